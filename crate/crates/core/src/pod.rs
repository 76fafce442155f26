//! POD datasets for the three snapshot/difference-quotient constructions and
//! the weighted POD basis computation.
//!
//! A dataset is a set of vectors `w^1..w^M` with positive weights
//! `γ_1..γ_M` in a Hilbert space `X`. Its POD operator is
//! `K f = Σ_j γ_j f^j w^j`; the POD modes are the left singular vectors of `K`
//! (`X`-orthonormal) and the POD eigenvalues `λ_k` its squared singular
//! values. The three constructions are:
//!
//! | variant       | vectors                     | weights           | `M`      |
//! |---------------|-----------------------------|-------------------|----------|
//! | `Standard`    | `u^1..u^N`                  | `Δt`              | `N`      |
//! | `StandardDq`  | `u^1..u^N`, `∂u^1..∂u^{N-1}` | `Δt`              | `2N - 1` |
//! | `NewDq`       | `u^1`, `∂u^1..∂u^{N-1}`      | `1`, then `Δt`    | `N`      |
//!
//! with backward difference quotients `∂u^j = (u^{j+1} - u^j) / Δt`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{PodError, Result};
use crate::fem::SnapshotSet;
use crate::linalg::Gram;

/// Default relative threshold on `λ_k / λ_1` for the numerical rank.
///
/// Corresponds to `σ_k / σ_1 > 1e-13`; everything above is resolved by the
/// weighted SVD.
pub const DEFAULT_RANK_TOL: f64 = 1e-26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InnerProductKind {
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "h1")]
    H01,
}

impl InnerProductKind {
    pub const ALL: [InnerProductKind; 2] = [InnerProductKind::L2, InnerProductKind::H01];

    pub fn label(self) -> &'static str {
        match self {
            InnerProductKind::L2 => "L2",
            InnerProductKind::H01 => "H01",
        }
    }
}

/// The pair of inner products available on the discrete space: `L²` through
/// the mass matrix and `H₀¹` through the stiffness matrix.
#[derive(Debug, Clone)]
pub struct InnerProducts {
    pub mass: Gram,
    pub stiffness: Gram,
}

impl InnerProducts {
    pub fn new(mass: Gram, stiffness: Gram) -> Result<Self> {
        if mass.dim() != stiffness.dim() {
            return Err(PodError::DimensionMismatch {
                expected: mass.dim(),
                found: stiffness.dim(),
            });
        }
        Ok(Self { mass, stiffness })
    }

    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    pub fn gram(&self, kind: InnerProductKind) -> &Gram {
        match kind {
            InnerProductKind::L2 => &self.mass,
            InnerProductKind::H01 => &self.stiffness,
        }
    }

    pub fn space(&self, kind: InnerProductKind) -> InnerProductSpace {
        InnerProductSpace {
            kind,
            gram: self.gram(kind).clone(),
        }
    }
}

/// A POD space `X`: its kind and the Gram matrix realizing `(·,·)_X`.
#[derive(Debug, Clone)]
pub struct InnerProductSpace {
    pub kind: InnerProductKind,
    pub gram: Gram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PodVariant {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "dq")]
    StandardDq,
    #[serde(rename = "newdq")]
    NewDq,
}

impl PodVariant {
    pub const ALL: [PodVariant; 3] = [PodVariant::Standard, PodVariant::StandardDq, PodVariant::NewDq];

    pub fn label(self) -> &'static str {
        match self {
            PodVariant::Standard => "standard",
            PodVariant::StandardDq => "dq",
            PodVariant::NewDq => "newdq",
        }
    }

    pub fn uses_difference_quotients(self) -> bool {
        !matches!(self, PodVariant::Standard)
    }
}

#[derive(Debug, Clone)]
pub struct PodDataset {
    vectors: DMatrix<f64>,
    weights: Vec<f64>,
    space: InnerProductSpace,
    variant: PodVariant,
    source_dt: f64,
}

impl PodDataset {
    pub fn new(
        vectors: DMatrix<f64>,
        weights: Vec<f64>,
        space: InnerProductSpace,
        variant: PodVariant,
        source_dt: f64,
    ) -> Result<Self> {
        if vectors.ncols() != weights.len() {
            return Err(PodError::DimensionMismatch {
                expected: vectors.ncols(),
                found: weights.len(),
            });
        }
        if weights.is_empty() {
            return Err(PodError::InvalidInput("empty POD dataset".into()));
        }
        if let Some(g) = weights.iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
            return Err(PodError::InvalidInput(format!("POD weight {g} is not positive")));
        }
        if vectors.nrows() != space.gram.dim() {
            return Err(PodError::DimensionMismatch {
                expected: space.gram.dim(),
                found: vectors.nrows(),
            });
        }
        Ok(Self {
            vectors,
            weights,
            space,
            variant,
            source_dt,
        })
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn variant(&self) -> PodVariant {
        self.variant
    }

    pub fn source_dt(&self) -> f64 {
        self.source_dt
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_j γ_j ‖w^j‖²_G`.
    pub fn energy(&self, gram: &Gram) -> f64 {
        gram.quad_columns(&self.vectors)
            .iter()
            .zip(&self.weights)
            .map(|(q, g)| g * q)
            .sum()
    }

    /// `W Γ^{1/2}`: the dataset vectors scaled by the square roots of the weights.
    fn weighted_vectors(&self) -> DMatrix<f64> {
        let mut w = self.vectors.clone();
        for (j, g) in self.weights.iter().enumerate() {
            w.column_mut(j).scale_mut(g.sqrt());
        }
        w
    }
}

/// POD modes (columns of `modes`, `X`-orthonormal) with their eigenvalues in
/// nonincreasing order.
#[derive(Debug, Clone)]
pub struct PodBasis {
    modes: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    space: InnerProductSpace,
    variant: PodVariant,
}

impl PodBasis {
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> DVector<f64> {
        self.modes.column(k).into_owned()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.sqrt()).collect()
    }

    /// Numerical rank `s`.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn space(&self) -> &InnerProductSpace {
        &self.space
    }

    pub fn variant(&self) -> PodVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.modes.nrows()
    }
}

/// How the singular value decomposition of the POD operator is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PodMethod {
    /// Thin SVD of `Lᵀ W Γ^{1/2}` where `G = L Lᵀ`; modes `φ = L^{-T} U`.
    #[default]
    WeightedSvd,
    /// `M × M` eigenproblem for `Γ^{1/2} (WᵀGW) Γ^{1/2}`; modes
    /// `φ_k = λ_k^{-1/2} K f_k`. Loses accuracy for small eigenvalues.
    Snapshots,
}

/// `(u^{j+1} - u^j) / Δt` for consecutive columns.
pub fn difference_quotients_of(u: &DMatrix<f64>, dt: f64) -> Result<DMatrix<f64>> {
    if u.ncols() < 2 {
        return Err(PodError::InvalidInput(format!(
            "difference quotients need at least 2 snapshots, got {}",
            u.ncols()
        )));
    }
    let n = u.ncols();
    Ok((u.columns(1, n - 1) - u.columns(0, n - 1)) / dt)
}

pub fn difference_quotients(snaps: &SnapshotSet) -> Result<DMatrix<f64>> {
    difference_quotients_of(snaps.snapshots(), snaps.dt())
}

pub fn build_dataset(snaps: &SnapshotSet, variant: PodVariant, kind: InnerProductKind) -> Result<PodDataset> {
    let dt = snaps.dt();
    let u = snaps.snapshots();
    let n = u.ncols();
    let (vectors, weights) = match variant {
        PodVariant::Standard => (u.clone(), vec![dt; n]),
        PodVariant::StandardDq => {
            let dq = difference_quotients(snaps)?;
            let mut w = DMatrix::zeros(u.nrows(), 2 * n - 1);
            w.columns_mut(0, n).copy_from(u);
            w.columns_mut(n, n - 1).copy_from(&dq);
            (w, vec![dt; 2 * n - 1])
        }
        PodVariant::NewDq => {
            let dq = difference_quotients(snaps)?;
            let mut w = DMatrix::zeros(u.nrows(), n);
            w.set_column(0, &u.column(0));
            w.columns_mut(1, n - 1).copy_from(&dq);
            let mut g = vec![dt; n];
            g[0] = 1.0;
            (w, g)
        }
    };
    PodDataset::new(vectors, weights, snaps.inner().space(kind), variant, dt)
}

pub fn compute_pod(data: &PodDataset, rank_tol: f64) -> Result<PodBasis> {
    compute_pod_with(data, rank_tol, PodMethod::WeightedSvd)
}

pub fn compute_pod_with(data: &PodDataset, rank_tol: f64, method: PodMethod) -> Result<PodBasis> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(PodError::InvalidInput(format!("rank_tol must lie in (0, 1), got {rank_tol}")));
    }
    let (modes, eigenvalues) = match method {
        PodMethod::WeightedSvd => pod_weighted_svd(data, rank_tol)?,
        PodMethod::Snapshots => pod_snapshots(data, rank_tol)?,
    };
    Ok(PodBasis {
        modes,
        eigenvalues,
        space: data.space.clone(),
        variant: data.variant,
    })
}

/// All POD singular values of the dataset (including round-off ones),
/// nonincreasing. Length `min(dim, M)`.
pub fn singular_values(data: &PodDataset) -> Result<Vec<f64>> {
    let (_, mut s) = thin_svd(&weighted_factor_matrix(data)?, false)?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn weighted_factor_matrix(data: &PodDataset) -> Result<DMatrix<f64>> {
    weighted_factor_with(&data.space.gram.cholesky()?, data)
}

fn weighted_factor_with(factor: &crate::linalg::GramFactor, data: &PodDataset) -> Result<DMatrix<f64>> {
    let b = factor.lt_mul(&data.weighted_vectors());
    if b.iter().any(|x| !x.is_finite()) {
        return Err(PodError::NonFinite("weighted POD data".into()));
    }
    Ok(b)
}

/// Thin SVD through faer; singular values nonincreasing, left singular
/// vectors as matching columns when requested.
fn thin_svd(b: &DMatrix<f64>, want_u: bool) -> Result<(Option<DMatrix<f64>>, Vec<f64>)> {
    let (m, n) = b.shape();
    let k = m.min(n);
    let fm = faer::Mat::<f64>::from_fn(m, n, |i, j| b[(i, j)]);
    let fail = |e| PodError::SolveFailed(format!("SVD: {e:?}"));
    let (u, s) = if want_u {
        let svd = fm.thin_svd().map_err(fail)?;
        let (u, s) = (svd.U(), svd.S().column_vector());
        (Some(DMatrix::from_fn(m, k, |i, j| u[(i, j)])), (0..k).map(|i| s[i]).collect::<Vec<_>>())
    } else {
        let s = fm.singular_values().map_err(fail)?;
        (None, s)
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let u = u.map(|u| DMatrix::from_fn(m, k, |i, j| u[(i, order[j])]));
    Ok((u, sorted))
}

fn pod_weighted_svd(data: &PodDataset, rank_tol: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let factor = data.space.gram.cholesky()?;
    let b = weighted_factor_with(&factor, data)?;
    let (u, sigma) = thin_svd(&b, true)?;
    let u = u.expect("left singular vectors requested");
    let lambda_1 = sigma[0] * sigma[0];
    if !(lambda_1 > 0.0) {
        return Err(PodError::ZeroData);
    }
    let s = sigma.iter().take_while(|&&x| x * x > rank_tol * lambda_1).count();
    let eigenvalues = sigma[..s].iter().map(|x| x * x).collect();
    Ok((factor.solve_lt(&u.columns(0, s).into_owned()), eigenvalues))
}

fn pod_snapshots(data: &PodDataset, rank_tol: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let wg = data.weighted_vectors();
    let k = data.space.gram.cross(&wg, &wg);
    if k.iter().any(|x| !x.is_finite()) {
        return Err(PodError::NonFinite("POD Gram matrix".into()));
    }
    let k = (&k + k.transpose()) * 0.5;
    let eig = SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let lambda_1 = eig.eigenvalues[order[0]];
    if !(lambda_1 > 0.0) {
        return Err(PodError::ZeroData);
    }
    if let Some(&i) = order.last() {
        let smallest = eig.eigenvalues[i];
        if smallest < -1e-10 * lambda_1 {
            return Err(PodError::NegativeEigenvalue { value: smallest });
        }
    }
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] > rank_tol * lambda_1)
        .collect();
    let mut modes = DMatrix::zeros(wg.nrows(), kept.len());
    let mut eigenvalues = Vec::with_capacity(kept.len());
    for (c, &i) in kept.iter().enumerate() {
        let lambda = eig.eigenvalues[i];
        let phi = &wg * eig.eigenvectors.column(i) / lambda.sqrt();
        modes.set_column(c, &phi);
        eigenvalues.push(lambda);
    }
    Ok((modes, eigenvalues))
}
