use std::process::ExitCode;
use thiserror::Error;

/// Exit-code contract: 0 success, 2 configuration error, 3 mathematical
/// precondition failure, 1 I/O failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Math(#[from] doeblin_markov::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Math(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
