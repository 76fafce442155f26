use thiserror::Error;

#[derive(Debug, Error)]
pub enum PodError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("all POD eigenvalues are below the rank tolerance")]
    ZeroData,

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("negative POD eigenvalue {value:e} below -1e-10 * lambda_1")]
    NegativeEigenvalue { value: f64 },

    #[error("requested r = {r} exceeds the numerical rank s = {s}")]
    RankExceeded { r: usize, s: usize },

    #[error("tail sum is zero but the pointwise error is {0:e}; check rank tolerance")]
    InconsistentTail(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PodError {
    /// True for failures caused by the filesystem rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, PodError::Io(_) | PodError::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, PodError>;
