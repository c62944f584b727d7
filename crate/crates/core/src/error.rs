use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate sample: need at least {needed} observations, got {got}")]
    Degenerate { needed: usize, got: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("lag {lag} leaves fewer than 2 pairs for a series of length {n}")]
    LagTooLarge { lag: usize, n: usize },

    #[error("process is not stationary: |phi| = {0} must be < 1")]
    NonStationary(f64),

    #[error("sampler gave up after {0} attempts")]
    SamplerExhausted(usize),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: row {row}, column {col}: {message}")]
    Ingest {
        path: String,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    IngestFile { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
