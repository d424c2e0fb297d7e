use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: must be a positive multiple of 1/2")]
    InvalidSpin(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix trace is {0:.12}, expected 1")]
    NotUnitTrace(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("fingerprint mismatch: record {record}, model {model}")]
    FingerprintMismatch { record: String, model: String },

    #[error("empty measurement record")]
    EmptyRecord,

    #[error("unsupported document version {found} (expected {expected})")]
    UnsupportedVersion { expected: u32, found: u32 },

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
