//! Both reconstruction routes: the sum over n at one basis centre, and the
//! phase-space integral of a single Ψⁿ field.
//!
//! Run with `cargo run --release --example reconstruction`.

use phasekit::basis::{BasisFamily, BasisParams};
use phasekit::transform::{forward_coeffs, forward_field, reconstruct_integral, reconstruct_sum, PhaseSpaceGrid, WaveFunction};

fn main() -> phasekit::Result<()> {
    let psi = WaveFunction::hermite(2, 0.3, -0.4, 0.9);
    let xs: Vec<f64> = (0..=12).map(|k| -3.0 + 0.5 * k as f64).collect();
    let exact: Vec<_> = xs.iter().map(|&x| psi.eval(x, 1.0)).collect();

    let params = BasisParams::new(0.3, -0.4, 0.9, 1.0)?;
    let summed = reconstruct_sum(&forward_coeffs(&psi, &params, 6)?, &xs);
    let sum_err = summed.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("sum route, n ≤ 6:        max error {sum_err:.2e}");

    let family = BasisFamily::new(0.9, 1.0)?;
    for size in [16, 32, 64] {
        // Ψⁿ of a Hermite state has polynomial tails, so the window is wide
        let grid = PhaseSpaceGrid::centered(0.3, -0.4, 11.0 * 0.9, 11.0 * family.ell(), size, size)?;
        for n in [0, 3] {
            let rec = reconstruct_integral(&forward_field(&psi, n, &grid, &family)?, &xs);
            let err = rec.values.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            println!(
                "integral route, n = {n}, {size:2}×{size:<2}: max error {err:.2e}, truncated: {}",
                rec.domain_truncated
            );
        }
    }
    Ok(())
}
