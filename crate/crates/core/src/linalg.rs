//! Small linear algebra layer: symmetric tridiagonal matrices with a
//! bidiagonal Cholesky factorization, and the [`Gram`] matrix type used for
//! every inner product in the crate.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{PodError, Result};

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(PodError::InvalidInput("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(PodError::DimensionMismatch {
                expected: diag.len() - 1,
                found: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    /// Constant three-point stencil `[off, center, off]` of size `n`.
    pub fn from_stencil(n: usize, center: f64, off: f64) -> Result<Self> {
        Self::new(vec![center; n], vec![off; n.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diag(&self) -> &[f64] {
        &self.off
    }

    /// `a * self + b * other`, used to build backward-Euler system matrices.
    pub fn combine(&self, a: f64, other: &SymTridiagonal, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(PodError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diag = self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect();
        let off = self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { diag, off })
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| self.row_dot(i, |j| v[j]))
    }

    pub fn mul_mat(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, m.ncols());
        for c in 0..m.ncols() {
            let col = m.column(c);
            for i in 0..n {
                out[(i, c)] = self.row_dot(i, |j| col[j]);
            }
        }
        out
    }

    #[inline]
    fn row_dot(&self, i: usize, x: impl Fn(usize) -> f64) -> f64 {
        let n = self.dim();
        let mut s = self.diag[i] * x(i);
        if i > 0 {
            s += self.off[i - 1] * x(i - 1);
        }
        if i + 1 < n {
            s += self.off[i] * x(i + 1);
        }
        s
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }

    pub fn cholesky(&self) -> Result<BidiagonalCholesky> {
        BidiagonalCholesky::factor(self)
    }
}

/// Cholesky factor `L` (lower bidiagonal) of an SPD tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct BidiagonalCholesky {
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl BidiagonalCholesky {
    fn factor(t: &SymTridiagonal) -> Result<Self> {
        let n = t.dim();
        let mut diag = Vec::with_capacity(n);
        let mut sub = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = t.diag[0];
        for i in 0..n {
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(PodError::NotPositiveDefinite(format!(
                    "tridiagonal pivot {pivot:e} at row {i}"
                )));
            }
            let l = pivot.sqrt();
            diag.push(l);
            if i + 1 < n {
                let s = t.off[i] / l;
                sub.push(s);
                pivot = t.diag[i + 1] - s * s;
            }
        }
        Ok(Self { diag, sub })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `Lᵀ · x` column by column.
    pub fn lt_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, x.ncols());
        for c in 0..x.ncols() {
            for i in 0..n {
                let mut s = self.diag[i] * x[(i, c)];
                if i + 1 < n {
                    s += self.sub[i] * x[(i + 1, c)];
                }
                out[(i, c)] = s;
            }
        }
        out
    }

    /// Solves `Lᵀ · y = x` in place.
    pub fn solve_lt_mut(&self, x: &mut DMatrix<f64>) {
        let n = self.dim();
        for c in 0..x.ncols() {
            x[(n - 1, c)] /= self.diag[n - 1];
            for i in (0..n - 1).rev() {
                x[(i, c)] = (x[(i, c)] - self.sub[i] * x[(i + 1, c)]) / self.diag[i];
            }
        }
    }

    /// Solves `L · y = x` in place.
    pub fn solve_l_mut(&self, x: &mut DMatrix<f64>) {
        let n = self.dim();
        for c in 0..x.ncols() {
            x[(0, c)] /= self.diag[0];
            for i in 1..n {
                x[(i, c)] = (x[(i, c)] - self.sub[i - 1] * x[(i - 1, c)]) / self.diag[i];
            }
        }
    }

    /// Solves `L Lᵀ y = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut m = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
        self.solve_l_mut(&mut m);
        self.solve_lt_mut(&mut m);
        DVector::from_column_slice(m.as_slice())
    }
}

/// Symmetric positive definite matrix realizing an inner product
/// `(u, v)_G = vᵀ G u` on coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Gram {
    Tridiagonal(SymTridiagonal),
    Dense(DMatrix<f64>),
}

impl Gram {
    /// Wraps a dense matrix after checking it is square and symmetric.
    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(PodError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let scale = m.norm().max(f64::MIN_POSITIVE);
        if (&m - m.transpose()).norm() > 1e-12 * scale {
            return Err(PodError::InvalidInput("dense Gram matrix is not symmetric".into()));
        }
        Ok(Gram::Dense(m))
    }

    pub fn dim(&self) -> usize {
        match self {
            Gram::Tridiagonal(t) => t.dim(),
            Gram::Dense(m) => m.nrows(),
        }
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            Gram::Tridiagonal(t) => t.mul_vec(v),
            Gram::Dense(m) => m * v,
        }
    }

    pub fn mul_mat(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Gram::Tridiagonal(t) => t.mul_mat(x),
            Gram::Dense(m) => m * x,
        }
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        v.dot(&self.mul_vec(u))
    }

    /// `vᵀ G v`, possibly slightly negative from round-off.
    pub fn quad(&self, v: &DVector<f64>) -> f64 {
        self.inner(v, v)
    }

    /// `xᵢᵀ G xᵢ` for every column `xᵢ`.
    pub fn quad_columns(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let gx = self.mul_mat(x);
        (0..x.ncols()).map(|c| x.column(c).dot(&gx.column(c))).collect()
    }

    /// `Xᵀ G Y`.
    pub fn cross(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        x.transpose() * self.mul_mat(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Gram::Tridiagonal(t) => t.to_dense(),
            Gram::Dense(m) => m.clone(),
        }
    }

    pub fn cholesky(&self) -> Result<GramFactor> {
        match self {
            Gram::Tridiagonal(t) => Ok(GramFactor::Bidiagonal(t.cholesky()?)),
            Gram::Dense(m) => Cholesky::new(m.clone())
                .map(GramFactor::Dense)
                .ok_or_else(|| PodError::NotPositiveDefinite("dense Gram matrix".into())),
        }
    }
}

/// Cholesky factor `G = L Lᵀ` of a [`Gram`] matrix.
#[derive(Debug, Clone)]
pub enum GramFactor {
    Bidiagonal(BidiagonalCholesky),
    Dense(Cholesky<f64, Dyn>),
}

impl GramFactor {
    /// `Lᵀ · x`.
    pub fn lt_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            GramFactor::Bidiagonal(b) => b.lt_mul(x),
            GramFactor::Dense(c) => c.l().transpose() * x,
        }
    }

    /// Solves `Lᵀ · y = x`.
    pub fn solve_lt(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            GramFactor::Bidiagonal(b) => {
                let mut y = x.clone();
                b.solve_lt_mut(&mut y);
                y
            }
            GramFactor::Dense(c) => {
                let mut y = x.clone();
                // L is lower triangular; Lᵀ is upper.
                let ok = c.l().transpose().solve_upper_triangular_mut(&mut y);
                debug_assert!(ok);
                y
            }
        }
    }
}

/// Factors a small dense SPD matrix, mapping failure to a solver error.
pub(crate) fn spd_factor(m: DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(PodError::NonFinite(what.to_string()));
    }
    Cholesky::new(m).ok_or_else(|| PodError::SolveFailed(format!("{what} is not positive definite")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SymTridiagonal {
        SymTridiagonal::new(vec![4.0, 5.0, 6.0, 3.0], vec![1.0, -2.0, 0.5]).unwrap()
    }

    #[test]
    fn matvec_matches_dense() {
        let t = sample();
        let v = DVector::from_vec(vec![1.0, -1.0, 2.0, 0.5]);
        let dense = t.to_dense() * &v;
        assert!((t.mul_vec(&v) - dense).norm() < 1e-14);
    }

    #[test]
    fn bidiagonal_cholesky_reconstructs() {
        let t = sample();
        let c = t.cholesky().unwrap();
        let eye = DMatrix::<f64>::identity(4, 4);
        let mut l = eye.clone();
        c.solve_l_mut(&mut l); // L^{-1}
        let linv = l;
        let lt = c.lt_mul(&eye);
        let rebuilt = lt.transpose() * &lt;
        assert!((rebuilt - t.to_dense()).norm() < 1e-13);
        let check = &linv * lt.transpose();
        assert!((check - eye).norm() < 1e-13);
    }

    #[test]
    fn solve_round_trips() {
        let t = sample();
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let x = t.cholesky().unwrap().solve(&b);
        assert!((t.mul_vec(&x) - b).norm() < 1e-13);
    }

    #[test]
    fn indefinite_is_rejected() {
        let t = SymTridiagonal::new(vec![1.0, 1.0], vec![2.0]).unwrap();
        assert!(matches!(t.cholesky(), Err(PodError::NotPositiveDefinite(_))));
    }

    #[test]
    fn dense_and_tridiagonal_factors_agree() {
        let t = sample();
        let x = DMatrix::from_fn(4, 3, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        let a = Gram::Tridiagonal(t.clone()).cholesky().unwrap();
        let b = Gram::dense(t.to_dense()).unwrap().cholesky().unwrap();
        assert!((a.lt_mul(&x) - b.lt_mul(&x)).norm() < 1e-12);
        assert!((a.solve_lt(&x) - b.solve_lt(&x)).norm() < 1e-12);
    }

    #[test]
    fn asymmetric_dense_gram_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(Gram::dense(m).is_err());
    }
}
