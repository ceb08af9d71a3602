use thiserror::Error;

pub type Result<T, E = SimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Validation(String),
    /// Not enough samples near the query point for the requested fit.
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error(transparent)]
    Core(#[from] funrec::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
