use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Payloads are converted to `f64` regardless of the scalar type so the
/// messages stay readable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    Size { dim: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix entry is not finite at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:e} at ({1}, {2}))")]
    NotHermitian(f64, usize, usize),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is {0} instead of 1")]
    Trace(f64),

    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge")]
    NoConvergence { dim: usize },

    #[error("point is on or too close to the chart boundary: {0}")]
    Boundary(String),

    #[error("rank-deficient term in metric sum at ({i}, {j}): denominator {denominator:e}, numerator {numerator:e}")]
    RankDeficiency {
        i: usize,
        j: usize,
        denominator: f64,
        numerator: f64,
    },

    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integral does not converge: {0}")]
    Integrability(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
