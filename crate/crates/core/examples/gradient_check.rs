//! Runs the oracle suites: tree exactness, uniform-pairwise invariance and
//! full-pipeline finite-difference gradient checks, then shows that a sign
//! error in the backward pass is caught.

use attrcrf::check::{gradient_check, run_all, Fault};

fn main() -> attrcrf::Result<()> {
    for r in run_all(0, Fault::None)? {
        println!(
            "{:<28} {} cases  max error {:.2e}  tolerance {:.0e}  {}",
            r.check,
            r.cases,
            r.max_error,
            r.tolerance,
            if r.passed { "ok" } else { "FAILED" }
        );
    }
    let broken = gradient_check(3, 0, Fault::GradientSign)?;
    println!("with a flipped gradient sign the check reports max error {:.2} ({})",
        broken.max_error,
        if broken.passed { "missed" } else { "caught" });
    Ok(())
}
