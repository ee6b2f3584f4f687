use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcorrError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("parameter `{name}` = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("Kraus set is not complete (‖Σ E†E − I‖ = {0:e})")]
    IncompleteKraus(f64),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, QcorrError>;
