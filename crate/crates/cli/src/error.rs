use std::path::PathBuf;

use decopoles_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numeric { context: String, source: CoreError },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("bad csv {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Config(_) | CliError::Csv { .. } => 2,
            CliError::Numeric {
                source: CoreError::Validation(_),
                ..
            } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Write { .. } => 1,
        }
    }
}

/// Attaches a description of the failing step to a core error.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, CoreError> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric {
            context: what.into(),
            source,
        })
    }
}
