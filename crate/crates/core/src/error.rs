use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("DIMACS parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Every high-level selection weight is zero, so no distribution exists.
    #[error("degenerate selection weights: total weight is {0}")]
    DegenerateWeights(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(message: impl Into<String>) -> Error {
    Error::InvalidArgument(message.into())
}
