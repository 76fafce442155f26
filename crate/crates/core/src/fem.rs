//! Piecewise-linear finite elements in 1D and the backward-Euler heat solver
//! that produces the snapshot data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{PodError, Result};
use crate::linalg::{Gram, SymTridiagonal};
use crate::pod::InnerProducts;

pub type InitialCondition = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Forcing = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Heat equation `u_t - nu u_xx = f` on an interval with homogeneous Dirichlet
/// conditions, together with its space/time grid.
#[derive(Clone)]
pub struct HeatProblem {
    pub nu: f64,
    pub domain: (f64, f64),
    pub final_time: f64,
    /// Total number of equally spaced nodes, both boundary nodes included.
    pub n_nodes: usize,
    /// Number of snapshots `N`; the time step is `T / (N - 1)`.
    pub n_snapshots: usize,
    pub initial_condition: InitialCondition,
    /// `None` means `f = 0`.
    pub forcing: Option<Forcing>,
}

impl fmt::Debug for HeatProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeatProblem")
            .field("nu", &self.nu)
            .field("domain", &self.domain)
            .field("final_time", &self.final_time)
            .field("n_nodes", &self.n_nodes)
            .field("n_snapshots", &self.n_snapshots)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl HeatProblem {
    /// `u(x, 0) = e^x sin(pi x)` on `[0, 1]`, `nu = 1`, `T = 1`, `f = 0`.
    pub fn test_problem(n_nodes: usize, n_snapshots: usize) -> Self {
        Self {
            nu: 1.0,
            domain: (0.0, 1.0),
            final_time: 1.0,
            n_nodes,
            n_snapshots,
            initial_condition: Arc::new(|x: f64| x.exp() * (PI * x).sin()),
            forcing: None,
        }
    }

    pub fn with_initial_condition(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.initial_condition = Arc::new(f);
        self
    }

    pub fn with_forcing(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.forcing = Some(Arc::new(f));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.domain;
        if !(self.nu > 0.0) {
            return Err(PodError::InvalidInput(format!("nu must be positive, got {}", self.nu)));
        }
        if !(b > a) {
            return Err(PodError::InvalidInput(format!("empty domain [{a}, {b}]")));
        }
        if !(self.final_time > 0.0) {
            return Err(PodError::InvalidInput(format!(
                "final time must be positive, got {}",
                self.final_time
            )));
        }
        if self.n_nodes < 3 {
            return Err(PodError::InvalidInput(format!(
                "need at least 3 nodes for an interior unknown, got {}",
                self.n_nodes
            )));
        }
        if self.n_snapshots < 2 {
            return Err(PodError::InvalidInput(format!(
                "need at least 2 snapshots, got {}",
                self.n_snapshots
            )));
        }
        for x in [a, b] {
            let g = (self.initial_condition)(x);
            if g.abs() > 1e-10 {
                return Err(PodError::InvalidInput(format!(
                    "initial condition is {g:e} at boundary x = {x}; expected 0"
                )));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.final_time / (self.n_snapshots - 1) as f64
    }

    pub fn mesh_width(&self) -> f64 {
        (self.domain.1 - self.domain.0) / (self.n_nodes - 1) as f64
    }

    pub fn interior_nodes(&self) -> Vec<f64> {
        let h = self.mesh_width();
        (1..self.n_nodes - 1).map(|i| self.domain.0 + i as f64 * h).collect()
    }

    /// Nodal interpolant of `g` on the interior nodes.
    pub fn interpolate(&self, g: impl Fn(f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.n_nodes - 2, self.interior_nodes().into_iter().map(g))
    }
}

/// Linear-element mass and stiffness matrices on the interior nodes.
#[derive(Debug, Clone)]
pub struct FemOperators {
    pub mass: SymTridiagonal,
    pub stiffness: SymTridiagonal,
    pub mesh_width: f64,
}

impl FemOperators {
    pub fn dim(&self) -> usize {
        self.mass.dim()
    }

    pub fn inner_products(&self) -> InnerProducts {
        InnerProducts {
            mass: Gram::Tridiagonal(self.mass.clone()),
            stiffness: Gram::Tridiagonal(self.stiffness.clone()),
        }
    }
}

pub fn assemble_operators(problem: &HeatProblem) -> Result<FemOperators> {
    problem.validate()?;
    let n = problem.n_nodes - 2;
    let h = problem.mesh_width();
    Ok(FemOperators {
        mass: SymTridiagonal::from_stencil(n, 4.0 * h / 6.0, h / 6.0)?,
        stiffness: SymTridiagonal::from_stencil(n, 2.0 / h, -1.0 / h)?,
        mesh_width: h,
    })
}

/// Time samples `u^1..u^N` of a discrete solution, stored as the columns of
/// `snapshots`, with the inner products of the space they live in.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    snapshots: DMatrix<f64>,
    times: Vec<f64>,
    dt: f64,
    inner: InnerProducts,
    loads: Option<DMatrix<f64>>,
}

impl SnapshotSet {
    /// Snapshots at `t_n = (n - 1) dt`.
    pub fn new(snapshots: DMatrix<f64>, dt: f64, inner: InnerProducts) -> Result<Self> {
        if snapshots.ncols() == 0 {
            return Err(PodError::InvalidInput("no snapshots".into()));
        }
        if !(dt > 0.0) {
            return Err(PodError::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        if snapshots.nrows() != inner.dim() {
            return Err(PodError::DimensionMismatch {
                expected: inner.dim(),
                found: snapshots.nrows(),
            });
        }
        if snapshots.iter().any(|x| !x.is_finite()) {
            return Err(PodError::NonFinite("snapshots".into()));
        }
        let times = (0..snapshots.ncols()).map(|n| n as f64 * dt).collect();
        Ok(Self {
            snapshots,
            times,
            dt,
            inner,
            loads: None,
        })
    }

    /// Attaches the load vectors `F^n` (one column per snapshot time).
    pub fn with_loads(mut self, loads: DMatrix<f64>) -> Result<Self> {
        if loads.shape() != self.snapshots.shape() {
            return Err(PodError::DimensionMismatch {
                expected: self.snapshots.ncols(),
                found: loads.ncols(),
            });
        }
        self.loads = Some(loads);
        Ok(self)
    }

    pub fn snapshots(&self) -> &DMatrix<f64> {
        &self.snapshots
    }

    pub fn snapshot(&self, n: usize) -> DVector<f64> {
        self.snapshots.column(n).into_owned()
    }

    pub fn len(&self) -> usize {
        self.snapshots.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.snapshots.nrows()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn final_time(&self) -> f64 {
        self.dt * (self.len() - 1) as f64
    }

    pub fn inner(&self) -> &InnerProducts {
        &self.inner
    }

    pub fn loads(&self) -> Option<&DMatrix<f64>> {
        self.loads.as_ref()
    }
}

/// Backward Euler: `(M/dt + nu A) u^{n+1} = M u^n / dt + F^{n+1}` from the
/// nodal interpolant of the initial condition.
pub fn solve_heat_be(problem: &HeatProblem, ops: &FemOperators) -> Result<SnapshotSet> {
    problem.validate()?;
    if ops.dim() != problem.n_nodes - 2 {
        return Err(PodError::DimensionMismatch {
            expected: problem.n_nodes - 2,
            found: ops.dim(),
        });
    }
    let dt = problem.dt();
    let n_snap = problem.n_snapshots;
    let system = ops
        .mass
        .combine(1.0 / dt, &ops.stiffness, problem.nu)?
        .cholesky()
        .map_err(|e| PodError::SolveFailed(format!("backward Euler system: {e}")))?;

    let nodes = problem.interior_nodes();
    let loads = problem.forcing.as_ref().map(|f| {
        let mut loads = DMatrix::zeros(ops.dim(), n_snap);
        for n in 0..n_snap {
            let t = n as f64 * dt;
            let f_nodes = DVector::from_iterator(nodes.len(), nodes.iter().map(|&x| f(x, t)));
            loads.set_column(n, &ops.mass.mul_vec(&f_nodes));
        }
        loads
    });

    let mut u = problem.interpolate(|x| (problem.initial_condition)(x));
    let mut snaps = DMatrix::zeros(ops.dim(), n_snap);
    snaps.set_column(0, &u);
    for n in 1..n_snap {
        let mut rhs = ops.mass.mul_vec(&u) / dt;
        if let Some(l) = &loads {
            rhs += l.column(n);
        }
        u = system.solve(&rhs);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(PodError::SolveFailed(format!("non-finite solution at step {n}")));
        }
        snaps.set_column(n, &u);
    }

    let set = SnapshotSet::new(snaps, dt, ops.inner_products())?;
    match loads {
        Some(l) => set.with_loads(l),
        None => Ok(set),
    }
}
