use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have dimension at least 1")]
    EmptyVector,

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("non-finite iterate at iteration {iteration} ({what})")]
    NonFiniteIterate { iteration: usize, what: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("schedule fails the convex-hull condition (max row residual {max_residual:e})")]
    ScheduleInvalid { max_residual: f64 },

    #[error("iteration cap exceeded: {evaluations} gradient evaluations (cap {cap})")]
    IterationCap { evaluations: usize, cap: usize },

    #[error("instance too large for the exact oracle ({m}x{n})")]
    InstanceTooLarge { m: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
