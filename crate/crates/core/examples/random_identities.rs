//! Error identities and bound constants on seeded random snapshot sets with
//! random SPD inner products.

use podlab::experiment::{identity_sweep_rows, ExperimentConfig};

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig { instances: 50, seed: 11, ..ExperimentConfig::default() };
    let rows = identity_sweep_rows(&cfg)?;
    let worst = rows.iter().map(|r| r.max_identity_defect).fold(0.0, f64::max);
    println!("{} bases from {} instances, worst identity defect {worst:.2e}", rows.len(), cfg.instances);

    for r in rows.iter().take(9) {
        println!(
            "#{:<3} dim={:<2} N={} T={:.2} {:<10} X={:<3} rank={:<2} C_pw={} / {}",
            r.instance,
            r.dim,
            r.snapshots,
            r.final_time,
            r.variant.label(),
            r.x.label(),
            r.rank,
            r.max_pointwise_observed.map_or("-".into(), |c| format!("{c:.3}")),
            r.pointwise_theory.map_or("-".into(), |c| format!("{c:.3}")),
        );
    }
    Ok(())
}
