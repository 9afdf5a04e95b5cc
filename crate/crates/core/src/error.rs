use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("rank-deficient state: {0}")]
    RankDeficient(String),
    #[error("inconsistent purities: {0}")]
    InconsistentPurities(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
