//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by tomography operations.
#[derive(Debug, Error)]
pub enum TomoError {
    #[error("{context}: dimension mismatch (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace differs from {expected} (got {got})")]
    BadTrace { expected: f64, got: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("Kraus set is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("stacked Kraus block is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("row {row}: predicted intensity {intensity:.3e} below floor with count {count}")]
    ModelViolation { row: usize, intensity: f64, count: u64 },

    #[error("degenerate intensity at row {row}: {intensity:.3e}")]
    DegenerateIntensity { row: usize, intensity: f64 },

    #[error("reconstruction did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("chi-square test is over-parameterized (nu = {nu})")]
    OverParameterized { nu: i64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl TomoError {
    pub(crate) fn dimension_mismatch(context: &'static str, expected: usize, got: usize) -> Self {
        TomoError::DimensionMismatch {
            context,
            expected,
            got,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        TomoError::InvalidArgument(msg.into())
    }
}

/// Toolkit result alias.
pub type Result<T> = std::result::Result<T, TomoError>;
