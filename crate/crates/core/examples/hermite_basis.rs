//! Basis wave functions and their Gram matrix.
//!
//! Run with `cargo run --example hermite_basis`.

use phasekit::basis::{basis_wavefunction, gauss_hermite, overlap, quadrature_size, BasisParams, PhaseOrigin};

fn main() -> phasekit::Result<()> {
    let params = BasisParams::new(1.0, 0.5, 0.8, 1.0)?;
    println!("a = {}, ℓ = ħ/2a = {}", params.a(), params.ell());

    println!("\n  x      φ0(x)              φ3(x)");
    for k in 0..=8 {
        let x = params.x_mean - 2.0 + 0.5 * k as f64;
        let (f0, f3) = (basis_wavefunction(0, x, &params), basis_wavefunction(3, x, &params));
        println!("{x:5.2}  {:+.4}{:+.4}i   {:+.4}{:+.4}i", f0.re, f0.im, f3.re, f3.im);
    }

    let n_max = 12;
    let rule = gauss_hermite(quadrature_size(n_max))?;
    let mut worst: f64 = 0.0;
    for m in 0..=n_max {
        for n in 0..=n_max {
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((overlap(m, n, &params, &rule) - target).norm());
        }
    }
    println!("\nmax |⟨m|n⟩ − δ_mn| for m, n ≤ {n_max}: {worst:.2e} ({} nodes)", rule.len());

    // the centred phase convention only changes a global factor per point
    let centred = params.with_phase_origin(PhaseOrigin::Centered);
    let x = 0.3;
    let ratio = basis_wavefunction(2, x, &params) / basis_wavefunction(2, x, &centred);
    println!("φ2 absolute / centred at x = {x}: |ratio| = {:.12}", ratio.norm());
    Ok(())
}
