use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A distribution, alphabet, or polytope failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Empirical estimation could not produce a distribution.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A CSV input could not be turned into samples. `row` is 1-based and
    /// counts the header as row 1.
    #[error("ingestion error at row {row}, column '{column}': {message}")]
    Ingest {
        row: usize,
        column: String,
        message: String,
    },

    #[error("ingestion error: {0}")]
    IngestFile(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    /// Bad scenario kind or parameters.
    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
