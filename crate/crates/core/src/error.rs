use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not normalized: total mass {0}")]
    NotNormalized(f64),

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("submodule is not isotropic")]
    NotIsotropic,

    #[error("dimension {0} is not square-free")]
    NotSquareFree(u64),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
