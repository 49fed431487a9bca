//! Runs the full check suite and prints the failing checks.
//!
//! Run with `cargo run --release --example verify_scorecard`.

use phasekit::verify::{run_verify, Injection, VerifyConfig};

fn main() -> phasekit::Result<()> {
    for injection in [None, Some(Injection::FlipXOrientation)] {
        let config = VerifyConfig {
            injection,
            ..VerifyConfig::default()
        };
        let card = run_verify(&config)?;
        println!("injection {:?}: {} passed, {} failed", injection, card.passed, card.failed);
        for c in card.failures() {
            println!(
                "  criterion {} {}: measured {:.3e}, allowed {:?}",
                c.criterion, c.name, c.measured, c.allowed
            );
        }
    }
    Ok(())
}
