use std::path::Path;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, flags or files. Exit status 2.
    #[error("{0}")]
    Validation(String),

    /// A solver or oracle hit a configured size or node limit. Exit status 3.
    #[error("{0}")]
    ResourceLimit(String),

    /// Failure writing results. Exit status 1.
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Output(_) => 1,
            CliError::Validation(_) => 2,
            CliError::ResourceLimit(_) => 3,
        })
    }

    /// Prefixes the message with the file it concerns.
    pub fn in_file(self, path: &Path) -> Self {
        let at = |m: String| format!("{}: {m}", path.display());
        match self {
            CliError::Validation(m) => CliError::Validation(at(m)),
            CliError::ResourceLimit(m) => CliError::ResourceLimit(at(m)),
            CliError::Output(m) => CliError::Output(at(m)),
        }
    }
}

impl From<taskalloc::Error> for CliError {
    fn from(e: taskalloc::Error) -> Self {
        if e.is_resource_limit() {
            CliError::ResourceLimit(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
