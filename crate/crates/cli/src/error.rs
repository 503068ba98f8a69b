use thiserror::Error;

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Resource(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Resource(_) => "resource",
            CliError::Internal(_) => "internal",
        }
    }
}

impl From<okv_core::Error> for CliError {
    fn from(e: okv_core::Error) -> Self {
        match e {
            okv_core::Error::ResourceExceeded { .. } => CliError::Resource(e.to_string()),
            okv_core::Error::Internal(_) => CliError::Internal(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
