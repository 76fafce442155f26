//! Observed pointwise bound constants across a dt sweep, r = 4.

use podlab::experiment::{bound_rows, ExperimentConfig};
use podlab::pod::PodVariant;

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig {
        r_list: vec![4],
        variants: Some(vec![PodVariant::NewDq]),
        ..ExperimentConfig::default()
    };
    println!("dt        X    proj        Y    C_obs     C_theory  weighted-sum C_obs");
    for row in bound_rows(&cfg)? {
        let p = &row.pointwise;
        let ws = row.weighted_sum.as_ref().and_then(|w| w.bound_constant_observed);
        println!(
            "1/{:<6.0} {:<4} {:<11} {:<4} {:.3e} {:.3e} {}",
            1.0 / row.dt,
            p.x.label(),
            p.projection.label(),
            p.y.label(),
            p.bound_constant_observed.unwrap_or(f64::NAN),
            p.bound_constant_theory.unwrap_or(f64::NAN),
            ws.map_or("-".into(), |w| format!("{w:.3e}"))
        );
    }
    Ok(())
}
