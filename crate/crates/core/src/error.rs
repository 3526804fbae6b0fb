use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{what} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { what: String, deviation: f64 },
    #[error("{what} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { what: String, min_eigenvalue: f64 },
    #[error("{what} is not normalized (deviation {deviation:.3e})")]
    NotNormalized { what: String, deviation: f64 },
    #[error("outcome sets differ: {0}")]
    OutcomeMismatch(String),
    #[error("observable is not sharp: {0}")]
    NotSharp(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
