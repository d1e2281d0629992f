use std::fmt::Display;
use std::path::Path;

/// A failure mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

pub fn data(e: impl Display) -> CliError {
    CliError::Data(e.to_string())
}

pub fn data_at(path: &Path, e: impl Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

pub fn internal_at(path: &Path, e: impl Display) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

pub type Result<T> = std::result::Result<T, CliError>;
