//! Normal-ordered differential operators on phase space and their
//! commutators.
//!
//! Run with `cargo run --example operator_algebra`.

use phasekit::basis::BasisParams;
use phasekit::diffop::{apply_to_polynomial, build_p_frak, build_p_hat, build_x_frak, build_x_hat, AlphaBeta, DiffOpExpr, Polynomial};
use phasekit::Complex64;

fn main() -> phasekit::Result<()> {
    let params = BasisParams::new(0.0, 0.0, 1.0, 1.0)?;

    for ab in [
        AlphaBeta::Linked(0.0),
        AlphaBeta::Linked(0.7),
        AlphaBeta::Pair { alpha: 1.0, beta: 3.0 },
    ] {
        let (xf, pf) = (build_x_frak(&params, ab)?, build_p_frak(&params, ab)?);
        let (xh, ph) = (build_x_hat(&params, ab)?, build_p_hat(&params, ab)?);
        println!("{ab:?}");
        println!("  p_frak = {}", pf.render());
        println!("  [x_frak, p_frak] = {}", xf.commutator(&pf)?.render());
        println!("  [x, p]           = {}", xh.commutator(&ph)?.render());
    }

    // ∂_X acting on X²P
    let d = DiffOpExpr::dx(1, 0)?;
    let q = Polynomial::monomial(1, Complex64::new(1.0, 0.0), [2, 0, 0, 0], [1, 0, 0, 0])?;
    let out = apply_to_polynomial(&d.compose(&d)?, &q)?;
    println!("\n∂X² (X²P) = {}", out.coeff([0; 4], [1, 0, 0, 0]));
    Ok(())
}
