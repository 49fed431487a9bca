//! Multidimensional operators and dispersion generators for a Minkowski
//! signature.
//!
//! Run with `cargo run --example dispersion_generators`.

use phasekit::diffop::SignConvention;
use phasekit::multidim::{build_dispersion_generators, check_multidim_commutators, validate_tensors, ParamTensors};

fn main() -> phasekit::Result<()> {
    let eta = vec![1.0, -1.0];
    let tensors = ParamTensors::diagonal(&[0.8, 1.2], eta, 1.0)?;
    let v = validate_tensors(&tensors);
    println!(
        "duality deviation {:.1e}, symmetry deviation {:.1e}",
        v.duality_deviation, v.eta_deviation
    );

    for conv in [SignConvention::Covariant, SignConvention::OneDim] {
        let dev = check_multidim_commutators(&tensors, conv, None)?;
        println!("{conv:?}: commutator deviation {:.1e}", dev.max());
    }

    let g = build_dispersion_generators(&tensors, 0, 1, SignConvention::Covariant)?;
    println!("\nz+_01 = {}", g.z_plus.render());
    println!("\nZ×_01 = {}", g.bold_cross.render());
    Ok(())
}
