//! Proper orthogonal decomposition (POD) of heat-equation data with
//! difference quotients.
//!
//! The pipeline runs bottom-up:
//!
//! - [`fem`]: linear finite elements and backward Euler on `(0, 1)`, giving
//!   the snapshots `u^1..u^N` and the mass/stiffness Gram matrices.
//! - [`pod`]: the standard, standard-DQ and new-DQ datasets and their weighted
//!   POD bases in `X = L²` or `X = H₀¹`.
//! - [`proj`]: the `X`-orthogonal and Ritz projections onto the first `r` modes.
//! - [`analysis`]: data error identities, pointwise and weighted-sum bounds.
//! - [`rom`]: the backward-Euler POD reduced order model and its scaling factors.
//! - [`experiment`] and [`cli`]: table/figure reproduction and output writers.
//!
//! ```
//! use podlab::fem::{assemble_operators, solve_heat_be, HeatProblem};
//! use podlab::pod::{build_dataset, compute_pod, InnerProductKind, PodVariant, DEFAULT_RANK_TOL};
//!
//! let problem = HeatProblem::test_problem(21, 11);
//! let snaps = solve_heat_be(&problem, &assemble_operators(&problem)?)?;
//! let data = build_dataset(&snaps, PodVariant::NewDq, InnerProductKind::L2)?;
//! let basis = compute_pod(&data, DEFAULT_RANK_TOL)?;
//! assert!(basis.eigenvalues()[0] > basis.eigenvalues()[1]);
//! # Ok::<(), podlab::PodError>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod linalg;
pub mod pod;
pub mod proj;
pub mod rom;
pub mod synthetic;

pub use error::{PodError, Result};
