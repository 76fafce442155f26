//! Leading POD singular values, standard vs new DQ, for several meshes.

use podlab::experiment::{singular_value_curves, ExperimentConfig};
use podlab::pod::PodVariant;

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig::default();
    let rows = singular_value_curves(&cfg)?;
    for &nodes in &cfg.figure_nodes {
        println!("nodes = {nodes}");
        for v in [PodVariant::Standard, PodVariant::NewDq] {
            let s: Vec<f64> = rows.iter().filter(|r| r.nodes == nodes && r.variant == v).map(|r| r.sigma).collect();
            let shown: Vec<String> = s.iter().step_by(4).map(|x| format!("{x:.2e}")).collect();
            println!("  {:<9} k=1,5,9,..: {}   sigma_last/sigma_1 = {:.1e}", v.label(), shown.join(" "), s[s.len() - 1] / s[0]);
        }
    }
    Ok(())
}
