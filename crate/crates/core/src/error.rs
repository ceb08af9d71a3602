use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or grids that do not line up.
    #[error("structural error: {0}")]
    Structural(String),
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model or configuration that fails its invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// A bandwidth configuration whose Cesàro limit does not exist.
    #[error("divergent configuration: {0}")]
    Divergent(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
