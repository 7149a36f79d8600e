use std::path::PathBuf;

use thiserror::Error;

/// Failures reading or writing instance files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

impl FormatError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Field { field: field.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// Errors that decide the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, files or parameters: exit 2.
    #[error("{0}")]
    Usage(String),
    /// Computed values outside their tolerance: exit 1.
    #[error("{0}")]
    Tolerance(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Core(#[from] optiwind_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use optiwind_core::Error as E;
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Usage(_) | CliError::Format(_) => 2,
            CliError::Core(E::InvalidInput(_) | E::Precondition(_) | E::Unknown(_) | E::Capacity { .. }) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
