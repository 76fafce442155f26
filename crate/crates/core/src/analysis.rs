//! Both sides of the POD projection error identities, the pointwise-in-time
//! bounds for the difference-quotient datasets, and optimality diagnostics.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{PodError, Result};
use crate::fem::SnapshotSet;
use crate::linalg::Gram;
use crate::pod::{InnerProductKind, InnerProducts, PodBasis, PodDataset, PodVariant};
use crate::pod::difference_quotients_of;
use crate::proj::{ProjectionKind, Projector, ReducedSpace};

/// Relative tolerance of the identity check.
pub const IDENTITY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub variant: PodVariant,
    pub x: InnerProductKind,
    pub y: InnerProductKind,
    pub projection: ProjectionKind,
    pub r: usize,
    /// `Σ_j γ_j ‖w^j - π w^j‖²_Y`, by projecting every dataset vector.
    pub actual_error: f64,
    /// `Σ_{i>r} λ_i ‖φ_i - π φ_i‖²_Y`.
    pub formula_value: f64,
    /// `Σ_j γ_j ‖w^j‖²_Y`; sets the absolute floor of the identity check.
    pub data_energy: f64,
    /// `max_j ‖u^j - π u^j‖²_Y`.
    pub pointwise_max: Option<f64>,
    /// `Σ_j Δt ‖u^j - π u^j‖²_Y`.
    pub weighted_sum: Option<f64>,
    /// Ratio of the checked error to `formula_value`; `None` if the tail is zero.
    pub bound_constant_observed: Option<f64>,
    pub bound_constant_theory: Option<f64>,
    pub violated: bool,
}

impl ErrorReport {
    pub fn identity_defect(&self) -> f64 {
        (self.actual_error - self.formula_value).abs()
    }

    pub fn identity_scale(&self) -> f64 {
        self.formula_value.max(1e-12 * self.data_energy).max(1e-300)
    }

    pub fn identity_holds(&self, rtol: f64) -> bool {
        self.identity_defect() <= rtol * self.identity_scale()
    }
}

/// `Σ_{i>r} λ_i ‖φ_i - π φ_i‖²_Y` for the modes of `red`.
///
/// For the `X`-orthogonal projection `Π_r^X φ_i = 0` when `i > r`, so the
/// term is `‖φ_i‖²_Y`.
pub fn tail_sum(red: &ReducedSpace, y: InnerProductKind, projection: ProjectionKind, inner: &InnerProducts) -> Result<f64> {
    let tail = red.tail_modes();
    if tail.ncols() == 0 {
        return Ok(0.0);
    }
    let residual = match projection {
        ProjectionKind::Orthogonal => tail,
        ProjectionKind::Ritz => &tail - Projector::of_kind(red, projection, inner)?.apply_mat(&tail)?,
    };
    Ok(weighted_norms(red.tail_eigenvalues(), inner.gram(y), &residual))
}

/// `Σ_i c_i ‖v_i‖²_G`, dropping round-off negatives.
pub(crate) fn weighted_norms(coef: &[f64], gram: &Gram, v: &DMatrix<f64>) -> f64 {
    let lambda_1 = coef.first().copied().unwrap_or(0.0).abs();
    gram.quad_columns(v)
        .iter()
        .zip(coef)
        .map(|(q, c)| {
            let t = c * q;
            if t < 0.0 && t.abs() < 1e-14 * lambda_1.max(f64::MIN_POSITIVE) {
                0.0
            } else {
                t
            }
        })
        .sum()
}

fn check_dims(basis: &PodBasis, inner: &InnerProducts) -> Result<()> {
    if basis.dim() != inner.dim() {
        return Err(PodError::DimensionMismatch {
            expected: inner.dim(),
            found: basis.dim(),
        });
    }
    Ok(())
}

/// Evaluates both sides of the data approximation error formula.
pub fn error_identity(
    data: &PodDataset,
    basis: &PodBasis,
    r: usize,
    y: InnerProductKind,
    projection: ProjectionKind,
    inner: &InnerProducts,
) -> Result<ErrorReport> {
    check_dims(basis, inner)?;
    let red = ReducedSpace::new(basis, r)?;
    let p = Projector::of_kind(&red, projection, inner)?;
    let w = data.vectors();
    let residual = w - p.apply_mat(w)?;
    let gram = inner.gram(y);
    let actual_error = weighted_norms(data.weights(), gram, &residual);
    let formula_value = tail_sum(&red, y, projection, inner)?;
    Ok(ErrorReport {
        variant: basis.variant(),
        x: basis.space().kind,
        y,
        projection,
        r,
        actual_error,
        formula_value,
        data_energy: data.energy(gram),
        pointwise_max: None,
        weighted_sum: None,
        bound_constant_observed: None,
        bound_constant_theory: None,
        violated: false,
    })
}

/// Constant of the pointwise bound for a basis built from difference
/// quotients; `None` for the standard dataset, which has no such bound.
pub fn pointwise_constant(variant: PodVariant, final_time: f64) -> Option<f64> {
    match variant {
        PodVariant::Standard => None,
        PodVariant::StandardDq => Some(2.0 * (1.0 / final_time).max(final_time)),
        PodVariant::NewDq => Some(2.0 * final_time.max(1.0)),
    }
}

pub fn weighted_sum_constant(final_time: f64) -> f64 {
    4.0 * (final_time * final_time).max(final_time)
}

struct SnapshotErrors {
    per_step: Vec<f64>,
    tail: f64,
    energy: f64,
    scale: f64,
}

fn snapshot_errors(
    snaps: &SnapshotSet,
    basis: &PodBasis,
    r: usize,
    y: InnerProductKind,
    projection: ProjectionKind,
) -> Result<SnapshotErrors> {
    let inner = snaps.inner();
    check_dims(basis, inner)?;
    let red = ReducedSpace::new(basis, r)?;
    let p = Projector::of_kind(&red, projection, inner)?;
    let u = snaps.snapshots();
    let gram = inner.gram(y);
    let per_step: Vec<f64> = gram
        .quad_columns(&(u - p.apply_mat(u)?))
        .into_iter()
        .map(|q| q.max(0.0))
        .collect();
    let tail = tail_sum(&red, y, projection, inner)?;
    let norms = gram.quad_columns(u);
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let energy = norms.iter().map(|q| q * snaps.dt()).sum();
    Ok(SnapshotErrors {
        per_step,
        tail,
        energy,
        scale,
    })
}

fn observed_ratio(err: f64, tail: f64, scale: f64) -> Result<Option<f64>> {
    if tail > 0.0 {
        return Ok(Some(err / tail));
    }
    if err > 1e-14 * scale {
        return Err(PodError::InconsistentTail(err));
    }
    Ok(None)
}

/// `max_j ‖u^j - π u^j‖²_Y` against the tail sum.
///
/// Standard-POD bases are evaluated but never flagged.
pub fn pointwise_bound_check(
    snaps: &SnapshotSet,
    basis: &PodBasis,
    r: usize,
    y: InnerProductKind,
    projection: ProjectionKind,
) -> Result<ErrorReport> {
    let e = snapshot_errors(snaps, basis, r, y, projection)?;
    let pointwise_max = e.per_step.iter().cloned().fold(0.0, f64::max);
    let observed = observed_ratio(pointwise_max, e.tail, e.scale)?;
    let theory = pointwise_constant(basis.variant(), snaps.final_time());
    let violated = matches!((observed, theory), (Some(o), Some(c)) if o > c);
    Ok(ErrorReport {
        variant: basis.variant(),
        x: basis.space().kind,
        y,
        projection,
        r,
        actual_error: pointwise_max,
        formula_value: e.tail,
        data_energy: e.energy,
        pointwise_max: Some(pointwise_max),
        weighted_sum: None,
        bound_constant_observed: observed,
        bound_constant_theory: theory,
        violated,
    })
}

/// `Σ_j Δt ‖u^j - π u^j‖²_Y` against the tail sum, for the new DQ dataset.
pub fn weighted_sum_bound_check(
    snaps: &SnapshotSet,
    basis: &PodBasis,
    r: usize,
    y: InnerProductKind,
    projection: ProjectionKind,
) -> Result<ErrorReport> {
    if basis.variant() != PodVariant::NewDq {
        return Err(PodError::InvalidInput(
            "weighted-sum bound applies to the new DQ basis only".into(),
        ));
    }
    let e = snapshot_errors(snaps, basis, r, y, projection)?;
    let pointwise_max = e.per_step.iter().cloned().fold(0.0, f64::max);
    let weighted_sum: f64 = e.per_step.iter().map(|q| q * snaps.dt()).sum();
    let observed = observed_ratio(weighted_sum, e.tail, e.scale)?;
    let theory = weighted_sum_constant(snaps.final_time());
    Ok(ErrorReport {
        variant: basis.variant(),
        x: basis.space().kind,
        y,
        projection,
        r,
        actual_error: weighted_sum,
        formula_value: e.tail,
        data_energy: e.energy,
        pointwise_max: Some(pointwise_max),
        weighted_sum: Some(weighted_sum),
        bound_constant_observed: observed,
        bound_constant_theory: Some(theory),
        violated: observed.is_some_and(|o| o > theory),
    })
}

/// Both sides of `max_j ‖z^j‖² ≤ 2 max{T,1} (‖z^1‖² + Σ_ℓ Δt ‖∂z^ℓ‖²)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SequenceBound {
    pub max_norm: f64,
    pub data_norm: f64,
    pub constant: f64,
}

impl SequenceBound {
    pub fn holds(&self) -> bool {
        self.max_norm <= self.constant * self.data_norm * (1.0 + 1e-12)
    }
}

/// `z` holds `z^1..z^N` as columns, `T = (N - 1) Δt`.
pub fn sequence_bound(z: &DMatrix<f64>, dt: f64, gram: &Gram) -> Result<SequenceBound> {
    if z.nrows() != gram.dim() {
        return Err(PodError::DimensionMismatch {
            expected: gram.dim(),
            found: z.nrows(),
        });
    }
    let norms = gram.quad_columns(z);
    let max_norm = norms.iter().cloned().fold(0.0, f64::max);
    let mut data_norm = norms[0];
    if z.ncols() > 1 {
        data_norm += dt * gram.quad_columns(&difference_quotients_of(z, dt)?).iter().sum::<f64>();
    }
    let t = dt * (z.ncols() - 1) as f64;
    Ok(SequenceBound {
        max_norm,
        data_norm,
        constant: 2.0 * t.max(1.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub x: InnerProductKind,
    pub y: InnerProductKind,
    pub r: usize,
    /// Tail term of the ROM error bound for this `(X, Y)`.
    pub lambda_r: f64,
    /// `‖φ_r^1‖²_Y`.
    pub lambda_r1: f64,
    /// `Σ_{i>r} λ_i ‖φ_i‖²_Y`.
    pub optimal_i_reference: f64,
    /// `Σ_{i>r} λ_i ‖φ_i - Π_r^Y φ_i‖²_Y`.
    pub optimal_ii_reference: f64,
    pub ratio_i: Option<f64>,
    pub ratio_ii: Option<f64>,
    /// `max_{r<i≤s} ‖φ_i - R_r φ_i‖_{L²}`.
    pub assumption_sup: Option<f64>,
}

/// ROM bound tail term: `X = L²` bounds use Ritz residuals of the tail modes,
/// `X = H₀¹` bounds use the modes themselves (`‖φ_i‖_{H₀¹} = 1`).
pub fn rom_tail(red: &ReducedSpace, y: InnerProductKind, inner: &InnerProducts, weights: &[f64]) -> Result<f64> {
    let tail = red.tail_modes();
    if tail.ncols() == 0 {
        return Ok(0.0);
    }
    match red.basis().space().kind {
        InnerProductKind::L2 => {
            let ritz = Projector::of_kind(red, ProjectionKind::Ritz, inner)?;
            let res = &tail - ritz.apply_mat(&tail)?;
            let mut t = weighted_norms(weights, &inner.mass, &res);
            if y == InnerProductKind::H01 {
                t += weighted_norms(weights, &inner.stiffness, &res);
            }
            Ok(t)
        }
        InnerProductKind::H01 => {
            let mut t = weighted_norms(weights, &inner.mass, &tail);
            if y == InnerProductKind::H01 {
                t += weights.iter().sum::<f64>();
            }
            Ok(t)
        }
    }
}

pub fn optimality_diagnostics(
    basis: &PodBasis,
    r: usize,
    y: InnerProductKind,
    inner: &InnerProducts,
    phi1: &DVector<f64>,
) -> Result<OptimalityReport> {
    check_dims(basis, inner)?;
    let red = ReducedSpace::new(basis, r)?;
    let lambdas = red.tail_eigenvalues();
    let gram = inner.gram(y);
    let tail = red.tail_modes();

    let lambda_r = rom_tail(&red, y, inner, lambdas)?;
    let lambda_r1 = gram.quad(phi1).max(0.0);
    let optimal_i_reference = weighted_norms(lambdas, gram, &tail);
    let optimal_ii_reference = if tail.ncols() == 0 {
        0.0
    } else {
        let py = Projector::new(&red, gram)?;
        weighted_norms(lambdas, gram, &(&tail - py.apply_mat(&tail)?))
    };
    let ratio = |reference: f64| (reference > 0.0).then(|| lambda_r / reference);
    let assumption_sup = if tail.ncols() == 0 {
        None
    } else {
        let ritz = Projector::of_kind(&red, ProjectionKind::Ritz, inner)?;
        let res = &tail - ritz.apply_mat(&tail)?;
        Some(
            inner
                .mass
                .quad_columns(&res)
                .into_iter()
                .map(|q| q.max(0.0).sqrt())
                .fold(0.0, f64::max),
        )
    };
    Ok(OptimalityReport {
        x: basis.space().kind,
        y,
        r,
        lambda_r,
        lambda_r1,
        optimal_i_reference,
        optimal_ii_reference,
        ratio_i: ratio(optimal_i_reference),
        ratio_ii: ratio(optimal_ii_reference),
        assumption_sup,
    })
}
