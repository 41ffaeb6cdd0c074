use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] jcesd_core::Error),

    #[error("JSON serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use jcesd_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Json(_) => EXIT_USAGE,
            CliError::ValidationFailed(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                E::InvalidParams(_) | E::InvalidGrid(_) => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}
