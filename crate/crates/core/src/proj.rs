//! Projections onto `X_r = span{φ_1..φ_r}` and discrete norms.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{PodError, Result};
use crate::linalg::{spd_factor, Gram};
use crate::pod::{InnerProductKind, InnerProducts, PodBasis};

/// The first `r` POD modes of a basis.
#[derive(Debug, Clone)]
pub struct ReducedSpace {
    basis: PodBasis,
    r: usize,
    phi: DMatrix<f64>,
}

impl ReducedSpace {
    pub fn new(basis: &PodBasis, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(PodError::InvalidInput("r must be at least 1".into()));
        }
        if r > basis.rank() {
            return Err(PodError::RankExceeded { r, s: basis.rank() });
        }
        Ok(Self {
            basis: basis.clone(),
            r,
            phi: basis.modes().columns(0, r).into_owned(),
        })
    }

    pub fn basis(&self) -> &PodBasis {
        &self.basis
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `Φ`, the `dim × r` mode matrix.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Modes `φ_{r+1}..φ_s`.
    pub fn tail_modes(&self) -> DMatrix<f64> {
        let s = self.basis.rank();
        self.basis.modes().columns(self.r, s - self.r).into_owned()
    }

    pub fn tail_eigenvalues(&self) -> &[f64] {
        &self.basis.eigenvalues()[self.r..]
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    /// `Φ c` for reduced coefficients `c`.
    pub fn expand(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.phi * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProjectionKind {
    /// `Π_r^X`, orthogonal in the basis inner product.
    #[serde(rename = "orthogonal")]
    Orthogonal,
    /// `R_r`, orthogonal in the `H₀¹` (stiffness) inner product.
    #[serde(rename = "ritz")]
    Ritz,
}

impl ProjectionKind {
    pub const ALL: [ProjectionKind; 2] = [ProjectionKind::Orthogonal, ProjectionKind::Ritz];

    pub fn label(self) -> &'static str {
        match self {
            ProjectionKind::Orthogonal => "Pi",
            ProjectionKind::Ritz => "Ritz",
        }
    }
}

/// Galerkin projection onto `X_r` in the inner product of `gram`:
/// `P v = Φ (ΦᵀGΦ)^{-1} ΦᵀG v`. The reduced matrix is factored once.
#[derive(Debug, Clone)]
pub struct Projector {
    phi: DMatrix<f64>,
    gram: Gram,
    reduced: Cholesky<f64, Dyn>,
}

impl Projector {
    pub fn new(red: &ReducedSpace, gram: &Gram) -> Result<Self> {
        if gram.dim() != red.dim() {
            return Err(PodError::DimensionMismatch {
                expected: red.dim(),
                found: gram.dim(),
            });
        }
        let phi = red.modes().clone();
        let reduced = spd_factor(gram.cross(&phi, &phi), "reduced Gram matrix")?;
        Ok(Self {
            phi,
            gram: gram.clone(),
            reduced,
        })
    }

    /// `Π_r^X` (in the basis' own inner product) or `R_r` (stiffness).
    pub fn of_kind(red: &ReducedSpace, kind: ProjectionKind, inner: &InnerProducts) -> Result<Self> {
        match kind {
            ProjectionKind::Orthogonal => Self::new(red, &red.basis().space().gram),
            ProjectionKind::Ritz => Self::new(red, &inner.stiffness),
        }
    }

    /// Reduced coefficients `c` with `P v = Φ c`.
    pub fn coefficients(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(v.len())?;
        let rhs = self.phi.tr_mul(&self.gram.mul_vec(v));
        Ok(self.reduced.solve(&rhs))
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.phi * self.coefficients(v)?)
    }

    /// Projects every column of `v`.
    pub fn apply_mat(&self, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(v.nrows())?;
        let rhs = self.phi.tr_mul(&self.gram.mul_mat(v));
        Ok(&self.phi * self.reduced.solve(&rhs))
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.phi.nrows() {
            return Err(PodError::DimensionMismatch {
                expected: self.phi.nrows(),
                found: n,
            });
        }
        Ok(())
    }
}

/// `Σ_k (v, φ_k)_X φ_k`, relying on the modes being `X`-orthonormal.
pub fn project_orthogonal(red: &ReducedSpace, v: &DVector<f64>) -> Result<DVector<f64>> {
    let gram = &red.basis().space().gram;
    if v.len() != red.dim() {
        return Err(PodError::DimensionMismatch {
            expected: red.dim(),
            found: v.len(),
        });
    }
    Ok(red.modes() * red.modes().tr_mul(&gram.mul_vec(v)))
}

pub fn project_ritz(red: &ReducedSpace, stiffness: &Gram, v: &DVector<f64>) -> Result<DVector<f64>> {
    Projector::new(red, stiffness)?.apply(v)
}

/// `√(vᵀGv)` with `G` the mass or stiffness matrix.
pub fn norm(kind: InnerProductKind, inner: &InnerProducts, v: &DVector<f64>) -> Result<f64> {
    Ok(norm_squared(kind, inner, v)?.sqrt())
}

/// `vᵀGv`, with round-off negatives above `-1e-14` clamped to zero.
pub fn norm_squared(kind: InnerProductKind, inner: &InnerProducts, v: &DVector<f64>) -> Result<f64> {
    let g = inner.gram(kind);
    if v.len() != g.dim() {
        return Err(PodError::DimensionMismatch {
            expected: g.dim(),
            found: v.len(),
        });
    }
    let q = g.quad(v);
    if !q.is_finite() {
        return Err(PodError::NonFinite("norm".into()));
    }
    if q < -1e-14 {
        return Err(PodError::NotPositiveDefinite(format!(
            "{} norm radicand {q:e}",
            kind.label()
        )));
    }
    Ok(q.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_operators, solve_heat_be, HeatProblem};
    use crate::pod::{build_dataset, compute_pod, PodVariant, DEFAULT_RANK_TOL};

    fn setup(kind: InnerProductKind) -> (ReducedSpace, InnerProducts, DMatrix<f64>) {
        let p = HeatProblem::test_problem(21, 11);
        let ops = assemble_operators(&p).unwrap();
        let s = solve_heat_be(&p, &ops).unwrap();
        let d = build_dataset(&s, PodVariant::NewDq, kind).unwrap();
        let b = compute_pod(&d, DEFAULT_RANK_TOL).unwrap();
        (ReducedSpace::new(&b, 3).unwrap(), ops.inner_products(), s.snapshots().clone())
    }

    fn test_vector(n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| ((i * 7 + 3) % 11) as f64 - 5.0)
    }

    #[test]
    fn rank_checks() {
        let (red, _, _) = setup(InnerProductKind::L2);
        assert!(ReducedSpace::new(red.basis(), 0).is_err());
        let s = red.basis().rank();
        assert!(matches!(
            ReducedSpace::new(red.basis(), s + 1),
            Err(PodError::RankExceeded { .. })
        ));
    }

    #[test]
    fn first_mode_is_fixed() {
        let (red, _, _) = setup(InnerProductKind::L2);
        let phi = red.basis().mode(0);
        let p = project_orthogonal(&red, &phi).unwrap();
        assert!((p - &phi).amax() < 1e-12 * phi.amax());
    }

    #[test]
    fn orthogonal_complement_maps_to_zero() {
        let (red, _, _) = setup(InnerProductKind::L2);
        let tail = red.tail_modes();
        let v = tail.column(0).into_owned();
        let p = project_orthogonal(&red, &v).unwrap();
        assert!(p.amax() < 1e-12 * v.amax());
    }

    #[test]
    fn pythagoras() {
        let (red, inner, _) = setup(InnerProductKind::L2);
        let v = test_vector(red.dim());
        let pv = project_orthogonal(&red, &v).unwrap();
        let m = &inner.mass;
        let lhs = m.quad(&v);
        let rhs = m.quad(&pv) + m.quad(&(&v - &pv));
        assert!((lhs - rhs).abs() < 1e-10 * lhs);
    }

    #[test]
    fn galerkin_with_basis_gram_matches_orthogonal() {
        let (red, _, _) = setup(InnerProductKind::L2);
        let v = test_vector(red.dim());
        let a = project_orthogonal(&red, &v).unwrap();
        let b = Projector::new(&red, &red.basis().space().gram).unwrap().apply(&v).unwrap();
        assert!((a - b).amax() < 1e-10);
    }

    #[test]
    fn ritz_equals_orthogonal_for_h1_basis() {
        let (red, inner, _) = setup(InnerProductKind::H01);
        let v = test_vector(red.dim());
        let a = project_orthogonal(&red, &v).unwrap();
        let b = project_ritz(&red, &inner.stiffness, &v).unwrap();
        assert!((&a - &b).amax() < 1e-10 * a.amax().max(1.0));
    }

    #[test]
    fn ritz_fixes_reduced_space_and_is_galerkin() {
        let (red, inner, _) = setup(InnerProductKind::L2);
        let w = red.modes() * DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let rw = project_ritz(&red, &inner.stiffness, &w).unwrap();
        assert!((&rw - &w).amax() < 1e-10 * w.amax());

        let v = test_vector(red.dim());
        let rv = project_ritz(&red, &inner.stiffness, &v).unwrap();
        let av = red.modes().tr_mul(&inner.stiffness.mul_vec(&v));
        let res = red.modes().tr_mul(&inner.stiffness.mul_vec(&(&v - &rv)));
        assert!(res.norm() <= 1e-10 * av.norm());
    }

    #[test]
    fn idempotent_and_linear() {
        let (red, inner, snaps) = setup(InnerProductKind::L2);
        for kind in ProjectionKind::ALL {
            let p = Projector::of_kind(&red, kind, &inner).unwrap();
            let u = snaps.column(2).into_owned();
            let v = test_vector(red.dim());
            let pu = p.apply(&u).unwrap();
            let ppu = p.apply(&pu).unwrap();
            assert!((&ppu - &pu).amax() < 1e-12 * pu.amax().max(1.0));
            let comb = p.apply(&(&u * 2.0 - &v * 3.0)).unwrap();
            let sep = p.apply(&u).unwrap() * 2.0 - p.apply(&v).unwrap() * 3.0;
            assert!((comb - sep).amax() < 1e-12 * 10.0);
        }
    }

    #[test]
    fn apply_mat_matches_columns() {
        let (red, inner, snaps) = setup(InnerProductKind::L2);
        let p = Projector::of_kind(&red, ProjectionKind::Ritz, &inner).unwrap();
        let all = p.apply_mat(&snaps).unwrap();
        for j in 0..snaps.ncols() {
            let one = p.apply(&snaps.column(j).into_owned()).unwrap();
            assert!((all.column(j) - one).amax() < 1e-13);
        }
    }

    #[test]
    fn norms() {
        let (red, inner, _) = setup(InnerProductKind::L2);
        assert_eq!(norm(InnerProductKind::L2, &inner, &DVector::zeros(red.dim())).unwrap(), 0.0);
        let phi = red.basis().mode(0);
        assert!((norm(InnerProductKind::L2, &inner, &phi).unwrap() - 1.0).abs() < 1e-12);
        assert!(norm(InnerProductKind::L2, &inner, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn negative_radicand_is_an_error() {
        let g = Gram::dense(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        let inner = InnerProducts::new(g.clone(), g).unwrap();
        let v = DVector::from_vec(vec![0.0, 1.0]);
        assert!(norm(InnerProductKind::L2, &inner, &v).is_err());
    }

    #[test]
    fn poincare_lower_bound() {
        let (red, inner, _) = setup(InnerProductKind::L2);
        // smallest generalized eigenvalue of (A, M) via M^{-1/2} A M^{-1/2}
        let m = inner.mass.to_dense();
        let a = inner.stiffness.to_dense();
        let l = m.clone().cholesky().unwrap();
        let linv = l.l().try_inverse().unwrap();
        let c = &linv * a * linv.transpose();
        let mu_min = c.symmetric_eigenvalues().min();
        for k in 0..5 {
            let v = DVector::from_fn(red.dim(), |i, _| ((i * (k + 2)) as f64).sin());
            let h1 = norm(InnerProductKind::H01, &inner, &v).unwrap();
            let l2 = norm(InnerProductKind::L2, &inner, &v).unwrap();
            assert!(h1 >= mu_min.sqrt() * l2 * (1.0 - 1e-12));
        }
    }
}
