use thiserror::Error;

/// Errors raised by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree class {degree} has fractional count {count}; round the distribution first")]
    FractionalCount { degree: usize, count: f64 },

    #[error("degree class {degree} has invalid count {count}")]
    InvalidCount { degree: usize, count: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("target distribution has zero L1 norm; proportional error is undefined")]
    ZeroNorm,

    #[error(
        "m = {m} exceeds the machine-precision limit of {limit}; \
         use the extended-precision inverse (ExactInverse) for this dimension"
    )]
    DimensionTooLarge { m: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed distribution file: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
