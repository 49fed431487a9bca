//! Finite differences of the induced operators against the exact ladder
//! recurrences on a sampled Ψⁿ stack.
//!
//! Run with `cargo run --release --example route_consistency`.

use phasekit::basis::BasisFamily;
use phasekit::grid::route_consistency_report;
use phasekit::transform::{PhaseSpaceGrid, WaveFunction};

fn main() -> phasekit::Result<()> {
    let family = BasisFamily::new(1.0, 1.0)?;
    let psi = WaveFunction::gaussian(0.0, 0.0, 1.0);
    let grid = PhaseSpaceGrid::centered(0.0, 0.0, 5.0, 5.0 * family.ell(), 64, 64)?;
    let report = route_consistency_report(&psi, &family, &grid, 6)?;

    println!(" n  op   rel. error   refined      order   plain form");
    for e in &report.entries {
        println!(
            "{:2}  {:?}   {:.3e}    {:.3e}    {:.3}   {:.3e}",
            e.n, e.operator, e.relative_error, e.refined_relative_error, e.order, e.plain_form_error
        );
    }
    println!(
        "max relative error {:.3e}, order {:.3}..{:.3}",
        report.max_relative_error, report.min_order, report.max_order
    );
    Ok(())
}
