//! Seeded random snapshot sets with random SPD inner products, for
//! exercising the identities and bounds away from the heat problem.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fem::SnapshotSet;
use crate::linalg::Gram;
use crate::pod::InnerProducts;

/// `B Bᵀ + shift·I` with `B` uniform in `[-1, 1]`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, shift: f64) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let g = &b * b.transpose() + DMatrix::identity(n, n) * shift;
    (&g + g.transpose()) * 0.5
}

pub fn random_inner_products<R: Rng>(rng: &mut R, n: usize) -> Result<InnerProducts> {
    let mass = Gram::dense(random_spd(rng, n, 0.1))?;
    let stiffness = Gram::dense(random_spd(rng, n, 0.1))?;
    InnerProducts::new(mass, stiffness)
}

#[derive(Debug, Clone, Copy)]
pub struct SyntheticParams {
    pub max_dim: usize,
    pub max_snapshots: usize,
    pub final_time: (f64, f64),
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            max_dim: 12,
            max_snapshots: 8,
            final_time: (0.1, 4.0),
        }
    }
}

/// A random snapshot set: dimension in `2..=max_dim`, `2..=max_snapshots`
/// snapshots uniform in `[-1, 1]`, final time drawn from `final_time`.
pub fn random_snapshot_set<R: Rng>(rng: &mut R, params: &SyntheticParams) -> Result<SnapshotSet> {
    let dim = rng.gen_range(2..=params.max_dim.max(2));
    let n = rng.gen_range(2..=params.max_snapshots.max(2));
    let t = rng.gen_range(params.final_time.0..=params.final_time.1);
    let inner = random_inner_products(rng, dim)?;
    let u = DMatrix::from_fn(dim, n, |_, _| rng.gen_range(-1.0..1.0));
    SnapshotSet::new(u, t / (n - 1) as f64, inner)
}

/// `count` instances from a single seed; the same seed gives the same list.
pub fn instances(seed: u64, count: usize, params: &SyntheticParams) -> Result<Vec<SnapshotSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_snapshot_set(&mut rng, params)).collect()
}
