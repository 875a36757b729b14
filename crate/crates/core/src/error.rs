use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("decomposition did not converge: {0}")]
    Decomposition(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("rank deficient input: {0}")]
    Rank(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("no certificate: {0}")]
    Certificate(String),

    #[error("retraction failed: {0}")]
    Retraction(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
