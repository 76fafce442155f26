//! POD-ROM errors for all three bases.

use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem};
use podlab::pod::{build_dataset, compute_pod, InnerProductKind, PodVariant, DEFAULT_RANK_TOL};
use podlab::proj::ReducedSpace;
use podlab::rom::{run_rom, RomConfig};

fn main() -> podlab::Result<()> {
    let problem = HeatProblem::test_problem(101, 101);
    let snaps = solve_heat_be(&problem, &assemble_operators(&problem)?)?;

    println!("X    variant    r  |e^N|_L2    |e^N|_H01   solution-norm err");
    for x in InnerProductKind::ALL {
        for v in PodVariant::ALL {
            let basis = compute_pod(&build_dataset(&snaps, v, x)?, DEFAULT_RANK_TOL)?;
            for r in [4, 6, 8] {
                let red = ReducedSpace::new(&basis, r)?;
                let run = run_rom(&RomConfig::new(r, x, snaps.dt()), &red, &snaps)?;
                println!(
                    "{:<4} {:<10} {r}  {:.3e}   {:.3e}   {:.3e}",
                    x.label(),
                    v.label(),
                    run.final_error_l2().sqrt(),
                    run.final_error_h01().sqrt(),
                    run.solution_norm_error
                );
            }
        }
    }
    Ok(())
}
