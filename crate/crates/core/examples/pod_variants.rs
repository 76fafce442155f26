//! Eigenvalues of the three POD datasets in both X spaces.

use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem};
use podlab::pod::{build_dataset, compute_pod, InnerProductKind, PodVariant, DEFAULT_RANK_TOL};

fn main() -> podlab::Result<()> {
    let problem = HeatProblem::test_problem(101, 101);
    let snaps = solve_heat_be(&problem, &assemble_operators(&problem)?)?;

    for x in InnerProductKind::ALL {
        for v in PodVariant::ALL {
            let data = build_dataset(&snaps, v, x)?;
            let basis = compute_pod(&data, DEFAULT_RANK_TOL)?;
            let lam = basis.eigenvalues();
            let head: Vec<String> = lam.iter().take(5).map(|l| format!("{l:.3e}")).collect();
            println!(
                "X={:<3} {:<10} M={:<3} rank={:<3} lambda: {}",
                x.label(),
                v.label(),
                data.len(),
                basis.rank(),
                head.join(" ")
            );
        }
    }
    Ok(())
}
