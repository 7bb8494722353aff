use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Library error; parse errors exit with 2, everything else with 1.
    #[error(transparent)]
    Domain(#[from] fidelimax_core::Error),
    /// Work ran but its result is unusable (invalid plan, non-converged
    /// solve); exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Domain(fidelimax_core::Error::Parse(_)) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}
