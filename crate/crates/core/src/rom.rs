//! Backward-Euler Galerkin POD reduced order model for the heat equation,
//! its errors against the FEM snapshots, and the ROM scaling factors.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::analysis::rom_tail;
use crate::error::{PodError, Result};
use crate::fem::SnapshotSet;
use crate::linalg::spd_factor;
use crate::pod::{InnerProductKind, InnerProducts};
use crate::proj::{ProjectionKind, Projector, ReducedSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InitialRule {
    /// `u_r^1 = Π_r^X u^1`.
    #[default]
    #[serde(rename = "pod")]
    PodProjection,
    /// `u_r^1 = R_r u^1`.
    #[serde(rename = "ritz")]
    RitzProjection,
}

#[derive(Debug, Clone)]
pub struct RomConfig {
    pub r: usize,
    pub x_kind: InnerProductKind,
    pub initial_rule: InitialRule,
    pub nu: f64,
    pub dt: f64,
    /// Load vectors `F^n`, one column per time level. Falls back to the
    /// loads stored with the snapshots; `None` in both means `f = 0`.
    pub forcing: Option<DMatrix<f64>>,
}

impl RomConfig {
    pub fn new(r: usize, x_kind: InnerProductKind, dt: f64) -> Self {
        Self {
            r,
            x_kind,
            initial_rule: InitialRule::PodProjection,
            nu: 1.0,
            dt,
            forcing: None,
        }
    }

    pub fn with_initial_rule(mut self, rule: InitialRule) -> Self {
        self.initial_rule = rule;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }
}

/// `M_r = ΦᵀMΦ` and `A_r = ΦᵀAΦ`.
#[derive(Debug, Clone)]
pub struct RomMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

pub fn assemble_rom(red: &ReducedSpace, inner: &InnerProducts, nu: f64) -> Result<RomMatrices> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(PodError::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    if inner.dim() != red.dim() {
        return Err(PodError::DimensionMismatch {
            expected: red.dim(),
            found: inner.dim(),
        });
    }
    let phi = red.modes();
    let mass = inner.mass.cross(phi, phi);
    let stiffness = inner.stiffness.cross(phi, phi);
    spd_factor(mass.clone(), "reduced mass matrix")?;
    spd_factor(stiffness.clone(), "reduced stiffness matrix")?;
    Ok(RomMatrices { mass, stiffness })
}

#[derive(Debug, Clone)]
pub struct RomRun {
    pub r: usize,
    pub dt: f64,
    pub nu: f64,
    /// Reduced coefficients `a^1..a^N` as columns; `u_r^n = Φ a^n`.
    pub trajectory: DMatrix<f64>,
    /// `‖e^n‖²_{L²}` for every time level.
    pub errors_l2: Vec<f64>,
    /// `‖∇e^n‖²_{L²}` for every time level.
    pub errors_h01: Vec<f64>,
    /// `‖e^N‖²_{L²} + ν Δt Σ_{n=1}^{N-1} ‖∇e^{n+1}‖²_{L²}`.
    pub solution_norm_error: f64,
    /// `‖e^N‖²_{L²} + Δt Σ_{n=1}^{N} ‖∇e^n‖²_{L²}`; the convention of the
    /// published solution-norm tables (includes the initial level).
    pub solution_norm_error_tabulated: f64,
    /// `‖φ_r^1‖²` with `φ_r^1 = u_r^1 - R_r u^1`.
    pub phi1_l2: f64,
    pub phi1_h01: f64,
    pub phi1: DVector<f64>,
}

impl RomRun {
    pub fn len(&self) -> usize {
        self.errors_l2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors_l2.is_empty()
    }

    /// `max_k ‖e^k‖²_{L²}`.
    pub fn max_error_l2(&self) -> f64 {
        self.errors_l2.iter().cloned().fold(0.0, f64::max)
    }

    /// `max_k ‖e^k‖²_{H₀¹}`.
    pub fn max_error_h01(&self) -> f64 {
        self.errors_h01.iter().cloned().fold(0.0, f64::max)
    }

    pub fn final_error_l2(&self) -> f64 {
        *self.errors_l2.last().expect("nonempty run")
    }

    pub fn final_error_h01(&self) -> f64 {
        *self.errors_h01.last().expect("nonempty run")
    }

    pub fn state(&self, red: &ReducedSpace, n: usize) -> DVector<f64> {
        red.modes() * self.trajectory.column(n)
    }
}

fn reduced_factor(m: &RomMatrices, dt: f64, nu: f64) -> Result<Cholesky<f64, Dyn>> {
    spd_factor(&m.mass / dt + &m.stiffness * nu, "reduced backward Euler system")
}

pub fn run_rom(config: &RomConfig, red: &ReducedSpace, snaps: &SnapshotSet) -> Result<RomRun> {
    let inner = snaps.inner();
    if config.r != red.r() {
        return Err(PodError::InvalidInput(format!(
            "config r = {} but reduced space has r = {}",
            config.r,
            red.r()
        )));
    }
    if config.x_kind != red.basis().space().kind {
        return Err(PodError::InvalidInput("config X kind differs from the basis".into()));
    }
    if (config.dt - snaps.dt()).abs() > 1e-12 * snaps.dt() {
        return Err(PodError::InvalidInput(format!(
            "config dt = {} but snapshots have dt = {}",
            config.dt,
            snaps.dt()
        )));
    }
    if snaps.dim() != red.dim() {
        return Err(PodError::DimensionMismatch {
            expected: red.dim(),
            found: snaps.dim(),
        });
    }
    let loads = config.forcing.as_ref().or(snaps.loads());
    if let Some(f) = loads {
        if f.shape() != snaps.snapshots().shape() {
            return Err(PodError::DimensionMismatch {
                expected: snaps.len(),
                found: f.ncols(),
            });
        }
    }

    let dt = config.dt;
    let nu = config.nu;
    let mats = assemble_rom(red, inner, nu)?;
    let system = reduced_factor(&mats, dt, nu)?;
    let phi = red.modes();

    let u1 = snaps.snapshot(0);
    let pi = Projector::of_kind(red, ProjectionKind::Orthogonal, inner)?;
    let ritz = Projector::of_kind(red, ProjectionKind::Ritz, inner)?;
    let a1 = match config.initial_rule {
        InitialRule::PodProjection => pi.coefficients(&u1)?,
        InitialRule::RitzProjection => ritz.coefficients(&u1)?,
    };
    let phi1 = phi * (&a1 - ritz.coefficients(&u1)?);

    let n = snaps.len();
    let mut traj = DMatrix::zeros(red.r(), n);
    traj.set_column(0, &a1);
    let mut a = a1;
    for k in 1..n {
        let mut rhs = &mats.mass * &a / dt;
        if let Some(f) = loads {
            rhs += phi.tr_mul(&f.column(k));
        }
        a = system.solve(&rhs);
        if a.iter().any(|x| !x.is_finite()) {
            return Err(PodError::SolveFailed(format!("non-finite ROM state at step {k}")));
        }
        traj.set_column(k, &a);
    }

    let err = snaps.snapshots() - phi * &traj;
    let errors_l2: Vec<f64> = inner.mass.quad_columns(&err).into_iter().map(|q| q.max(0.0)).collect();
    let errors_h01: Vec<f64> = inner.stiffness.quad_columns(&err).into_iter().map(|q| q.max(0.0)).collect();
    let last = errors_l2[n - 1];
    let solution_norm_error = last + nu * dt * errors_h01[1..].iter().sum::<f64>();
    let solution_norm_error_tabulated = last + dt * errors_h01.iter().sum::<f64>();

    Ok(RomRun {
        r: red.r(),
        dt,
        nu,
        trajectory: traj,
        errors_l2,
        errors_h01,
        solution_norm_error,
        solution_norm_error_tabulated,
        phi1_l2: inner.mass.quad(&phi1).max(0.0),
        phi1_h01: inner.stiffness.quad(&phi1).max(0.0),
        phi1,
    })
}

/// How the bound denominators and `err_3` are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScalingConvention {
    /// Tail sums weighted by `λ_i`, `err_3` = [`RomRun::solution_norm_error`].
    #[default]
    #[serde(rename = "theorem")]
    Theorem,
    /// The convention that reproduces the published scaling-factor table:
    /// `C_2`, `C_3` tails weighted by `√λ_i`, `err_3` =
    /// [`RomRun::solution_norm_error_tabulated`].
    #[serde(rename = "tabulated")]
    Tabulated,
}

/// Observed ROM bound constants. `C_1..C_3` are set for an `L²` basis and
/// `C_4..C_6` for an `H₀¹` basis; a zero denominator leaves the entry `None`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ScalingFactors {
    pub err1: f64,
    pub err2: f64,
    pub err3: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub c6: Option<f64>,
}

impl ScalingFactors {
    pub fn all(&self) -> [Option<f64>; 6] {
        [self.c1, self.c2, self.c3, self.c4, self.c5, self.c6]
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 1e-300).then(|| num / den)
}

pub fn scaling_factors(
    run: &RomRun,
    red: &ReducedSpace,
    inner: &InnerProducts,
    convention: ScalingConvention,
) -> Result<ScalingFactors> {
    if run.r != red.r() {
        return Err(PodError::InvalidInput("run and reduced space differ in r".into()));
    }
    let lambdas = red.tail_eigenvalues();
    let err1 = run.max_error_l2();
    let err2 = run.max_error_h01();
    let err3 = match convention {
        ScalingConvention::Theorem => run.solution_norm_error,
        ScalingConvention::Tabulated => run.solution_norm_error_tabulated,
    };
    let tail_l2 = rom_tail(red, InnerProductKind::L2, inner, lambdas)?;
    let mut out = ScalingFactors {
        err1,
        err2,
        err3,
        ..Default::default()
    };
    match red.basis().space().kind {
        InnerProductKind::L2 => {
            let tail_h1 = match convention {
                ScalingConvention::Theorem => rom_tail(red, InnerProductKind::H01, inner, lambdas)?,
                ScalingConvention::Tabulated => {
                    let sigma: Vec<f64> = lambdas.iter().map(|l| l.sqrt()).collect();
                    rom_tail(red, InnerProductKind::H01, inner, &sigma)?
                }
            };
            out.c1 = ratio(err1, tail_l2 + run.phi1_l2);
            out.c2 = ratio(err2, tail_h1 + run.phi1_h01);
            out.c3 = ratio(err3, tail_h1 + run.phi1_l2);
        }
        InnerProductKind::H01 => {
            let tail_h1 = rom_tail(red, InnerProductKind::H01, inner, lambdas)?;
            out.c4 = ratio(err1, tail_l2 + run.phi1_l2);
            out.c5 = ratio(err2, tail_h1 + run.phi1_h01);
            out.c6 = ratio(err3, tail_h1 + run.phi1_l2);
        }
    }
    Ok(out)
}
