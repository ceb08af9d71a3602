use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Configuration is well-formed but violates a theoretical hypothesis.
    #[error("infeasible hypothesis: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(String),
    /// The study ran but its output would not be meaningful.
    #[error("study aborted: {0}")]
    Aborted(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
            CliError::Aborted(_) => 1,
        }
    }
}

impl From<funrec::Error> for CliError {
    fn from(e: funrec::Error) -> Self {
        match e {
            funrec::Error::Divergent(m) => CliError::Infeasible(m),
            funrec::Error::Io(e) => CliError::Io(e.to_string()),
            funrec::Error::Csv(e) if e.is_io_error() => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<funrec_simlab::SimError> for CliError {
    fn from(e: funrec_simlab::SimError) -> Self {
        match e {
            funrec_simlab::SimError::Core(c) => c.into(),
            funrec_simlab::SimError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(format!("csv: {e}"))
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
