use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad user input; the message names the offending field.
    #[error("{field}: {message}")]
    Validation { field: &'static str, message: String },
    #[error("{0}")]
    FastPathUnavailable(String),
    #[error("{failed} of {total} self-test suites failed")]
    SelftestFailed { failed: usize, total: usize },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn validation(field: &'static str, message: impl ToString) -> Self {
        CliError::Validation {
            field,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::SelftestFailed { .. } | CliError::Internal(_) => ExitCode::from(1),
            CliError::Validation { .. } => ExitCode::from(2),
            CliError::FastPathUnavailable(_) => ExitCode::from(3),
        }
    }
}
