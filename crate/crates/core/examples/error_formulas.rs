//! Data approximation error vs the tail-sum formula for the new DQ basis,
//! 100 elements and 200 steps.

use podlab::experiment::{formula_rows, ExperimentConfig};

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig { steps: Some(200), ..ExperimentConfig::default() };
    println!("r  proj        Y    actual      formula     rel. defect");
    for e in formula_rows(&cfg)? {
        println!(
            "{:<2} {:<11} {:<4} {:.4e}  {:.4e}  {:.1e}",
            e.r,
            e.projection.label(),
            e.y.label(),
            e.actual_error,
            e.formula_value,
            e.identity_defect() / e.identity_scale()
        );
    }
    Ok(())
}
