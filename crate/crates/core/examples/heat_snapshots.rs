//! Backward-Euler FEM snapshots of the heat test problem, plus a forced run.

use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem};

fn main() -> podlab::Result<()> {
    // 101 mesh nodes (h = 1/100), 101 snapshots on [0, 1]
    let problem = HeatProblem::test_problem(101, 101);
    let ops = assemble_operators(&problem)?;
    let snaps = solve_heat_be(&problem, &ops)?;
    println!("dim {} snapshots {} dt {:.4e}", snaps.dim(), snaps.len(), snaps.dt());

    let m = &snaps.inner().mass;
    for n in [0, 1, 10, 50, 100] {
        println!("t = {:.2}  |u|_L2 = {:.6e}", snaps.times()[n], m.quad(&snaps.snapshot(n)).sqrt());
    }

    let forced = HeatProblem::test_problem(41, 21)
        .with_initial_condition(|_| 0.0)
        .with_forcing(|x, t| (std::f64::consts::PI * x).sin() * (1.0 + t));
    let fs = solve_heat_be(&forced, &assemble_operators(&forced)?)?;
    let last = fs.snapshot(fs.len() - 1);
    println!("forced run: |u^N|_L2 = {:.6e}", fs.inner().mass.quad(&last).sqrt());
    Ok(())
}
