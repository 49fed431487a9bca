//! Coefficients of a displaced Gaussian on a basis centred elsewhere.
//!
//! The weights |ψⁿ|² follow a Poisson distribution in `n`.
//!
//! Run with `cargo run --example coherent_transform`.

use phasekit::basis::BasisParams;
use phasekit::transform::{bessel_residual, forward_coeffs, WaveFunction};

fn main() -> phasekit::Result<()> {
    let params = BasisParams::new(0.0, 0.0, 1.0, 1.0)?;
    let psi = WaveFunction::gaussian(1.5, 0.8, 1.0);
    let coeffs = forward_coeffs(&psi, &params, 16)?;

    // |X − x0|²/4a² + |P − p0|²/4ℓ² with a = 1, ℓ = 1/2
    let lambda = 1.5f64.powi(2) / 4.0 + 0.8f64.powi(2);
    let mut poisson = (-lambda).exp();
    println!(" n   |ψⁿ|²       Poisson");
    for (n, c) in coeffs.coeffs.iter().enumerate().take(10) {
        println!("{n:2}   {:.8}  {:.8}", c.norm_sqr(), poisson);
        poisson *= lambda / (n + 1) as f64;
    }
    for n_max in [2, 4, 8, 16] {
        println!("1 − Σ_{{n≤{n_max}}} |ψⁿ|² = {:.3e}", bessel_residual(&psi, &params, n_max)?);
    }
    Ok(())
}
