use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Quadrature or another iterative routine gave up before reaching its
    /// tolerance. `partial` is the best estimate available at that point.
    #[error("numerical failure: {message} (partial estimate {partial})")]
    NumericalFailure { message: String, partial: Complex64 },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("audit failed: {0}")]
    AuditFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
