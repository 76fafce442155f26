//! ROM scaling factors C1..C6 as dt shrinks, in both conventions.

use podlab::experiment::{scaling_rows, ExperimentConfig};
use podlab::pod::PodVariant;
use podlab::rom::ScalingConvention;

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig {
        r_list: vec![4],
        variants: Some(vec![PodVariant::NewDq]),
        ..ExperimentConfig::default()
    };
    let rows = scaling_rows(&cfg)?;
    for conv in [ScalingConvention::Theorem, ScalingConvention::Tabulated] {
        println!("{conv:?}");
        for &dt in &cfg.dt_sweep {
            let mut c = [None; 6];
            for row in rows.iter().filter(|r| r.convention == conv && (r.dt - dt).abs() < 1e-12) {
                for (i, v) in row.factors.all().into_iter().enumerate() {
                    c[i] = c[i].or(v);
                }
            }
            let cells: Vec<String> = c.iter().map(|v| v.map_or("-".into(), |v| format!("{v:.2e}"))).collect();
            println!("  dt=1/{:<4.0} {}", 1.0 / dt, cells.join("  "));
        }
    }
    Ok(())
}
