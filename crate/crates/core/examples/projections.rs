//! X-orthogonal vs Ritz projection of the final snapshot onto r POD modes.

use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem};
use podlab::pod::{build_dataset, compute_pod, InnerProductKind, PodVariant, DEFAULT_RANK_TOL};
use podlab::proj::{norm, ProjectionKind, Projector, ReducedSpace};

fn main() -> podlab::Result<()> {
    let problem = HeatProblem::test_problem(101, 101);
    let snaps = solve_heat_be(&problem, &assemble_operators(&problem)?)?;
    let basis = compute_pod(&build_dataset(&snaps, PodVariant::NewDq, InnerProductKind::L2)?, DEFAULT_RANK_TOL)?;
    let u = snaps.snapshot(snaps.len() - 1);

    println!("r   proj        |e|_L2      |e|_H01");
    for r in [1, 2, 4, 6, 8] {
        let red = ReducedSpace::new(&basis, r)?;
        for kind in ProjectionKind::ALL {
            let p = Projector::of_kind(&red, kind, snaps.inner())?;
            let e = &u - p.apply(&u)?;
            println!(
                "{r:<3} {:<11} {:.3e}   {:.3e}",
                kind.label(),
                norm(InnerProductKind::L2, snaps.inner(), &e)?,
                norm(InnerProductKind::H01, snaps.inner(), &e)?
            );
        }
    }
    Ok(())
}
