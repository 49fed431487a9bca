//! Truncated operator matrices and the edge defect of [x, p].
//!
//! Run with `cargo run --example matrix_representations`.

use phasekit::basis::BasisParams;
use phasekit::matrix::{commutator, dispersion_matrices, hermitian_eigenvalues, p_matrix, x_matrix};

fn main() -> phasekit::Result<()> {
    let params = BasisParams::new(0.0, 0.0, 0.5, 1.0)?;
    let n = 6;
    let x = x_matrix(&params, n)?.to_dense();
    let p = p_matrix(&params, n)?.to_dense();

    println!("[x, p] / iħ, truncated at N = {n}:");
    let c = commutator(&x, &p)?;
    for row in 0..n {
        let line: Vec<String> = (0..n)
            .map(|col| format!("{:6.2}", (c.get(row, col) / phasekit::Complex64::i()).re))
            .collect();
        println!("  {}", line.join(" "));
    }

    let (sx, sp) = dispersion_matrices(&params, 10)?;
    println!(
        "\nσ_x² diagonal, (2n+1)a² = {:.6?}",
        (0..5).map(|k| sx.get(k, k).re).collect::<Vec<_>>()
    );
    println!(
        "σ_p² diagonal, (2n+1)ℓ² = {:.6?}",
        (0..5).map(|k| sp.get(k, k).re).collect::<Vec<_>>()
    );

    // eigenvalues of the truncated x are the Gauss–Hermite nodes scaled by a√2
    let ev = hermitian_eigenvalues(&x);
    println!("\neigenvalues of x (N = {n}): {:.4?}", ev);
    Ok(())
}
