use std::io;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;
use toyworld_core::amplitudes::AmplitudeError;
use toyworld_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_BAD_ARGS: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadArgs(String),
    #[error("{0}")]
    Assertion(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadArgs(_) => EXIT_BAD_ARGS,
            CliError::Assertion(_) => EXIT_ASSERTION,
            CliError::Core(e) => match e {
                // these only reach the CLI through user-supplied parameters
                CoreError::InvalidCutoff { .. }
                | CoreError::InvalidStates(_)
                | CoreError::Range { .. }
                | CoreError::Amplitude(AmplitudeError::Parameters(_)) => EXIT_BAD_ARGS,
                _ => EXIT_NUMERICAL,
            },
            CliError::Io { .. } | CliError::Json(_) => EXIT_NUMERICAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::BadArgs(_) => "bad_arguments",
            CliError::Assertion(_) => "assertion_failed",
            CliError::Core(_) if self.exit_code() == EXIT_BAD_ARGS => "bad_arguments",
            CliError::Core(_) => "numerical",
            CliError::Io { .. } => "io",
            CliError::Json(_) => "serialization",
        }
    }

    /// One-line JSON for the error stream.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Payload {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
