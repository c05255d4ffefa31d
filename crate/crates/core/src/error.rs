use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DeformError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid symplectic form: {0}")]
    InvalidSymplecticForm(String),

    #[error("metric is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("metric is not compatible with the symplectic form: |J^2 + I| = {residual:.3e} exceeds {tol:.0e}")]
    Incompatible { residual: f64, tol: f64 },

    #[error("hbar must be finite and non-negative, got {0}")]
    InvalidHbar(f64),

    #[error("lattice cutoff N = {cutoff} is smaller than the support radius {radius}")]
    CutoffTooSmall { cutoff: usize, radius: i64 },

    #[error("grid must be sorted, non-negative and start at 0")]
    InvalidGrid,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, DeformError>;
