use std::path::PathBuf;

use qcldpc::error::Error as CoreError;
use thiserror::Error;

/// A failed command, carrying the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad parameters, malformed files, unreadable paths. Exit 2.
    #[error("{0}")]
    Invalid(String),
    /// Key sampling ran out of retries. Exit 3.
    #[error("{0}")]
    Sampling(String),
    /// Belief propagation did not produce a valid plaintext. Exit 4.
    #[error("{0}")]
    Decode(String),
    /// An attack found nothing within its budget. Exit 5.
    #[error("{0}")]
    NotFound(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Sampling(_) => 3,
            CliError::Decode(_) => 4,
            CliError::NotFound(_) => 5,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::ExhaustedRetries(_) => CliError::Sampling(msg),
            CoreError::DecodeFailure => CliError::Decode(msg),
            CoreError::NotFound | CoreError::NoCandidate => CliError::NotFound(msg),
            _ => CliError::Invalid(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
