use std::path::Path;

use thiserror::Error;
use varscale_core::VarError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Data { path: String, source: VarError },

    #[error("{0}")]
    Io(String),

    /// Some combinations could not be estimated; the others were written.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn data(path: impl AsRef<Path>, source: VarError) -> Self {
        CliError::Data {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn io(path: impl AsRef<Path>, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.as_ref().display()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
