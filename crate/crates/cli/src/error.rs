use sedsim::SimError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{key}` ({origin})")]
    UnknownKey { key: String, origin: String },
    #[error("key `{key}` set again on line {line}, first set on {first}")]
    Duplicate {
        key: String,
        line: usize,
        first: String,
    },
    #[error("key `{key}` ({origin}): expected {expected}, found {value:?}")]
    Type {
        key: String,
        origin: String,
        expected: String,
        value: String,
    },
    #[error("key `{key}` is missing: {reason}")]
    Missing { key: String, reason: String },
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("output directory {0} already exists and is not empty")]
    OutputExists(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Machine-readable failure description printed on stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "config".into(),
            CliError::Sim(e) => e.kind().into(),
            CliError::OutputExists(_) => "output_exists".into(),
            CliError::Io(_) => "io".into(),
            CliError::Json(_) => "serialization".into(),
        }
    }

    /// 2 for problems with the inputs, 1 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::OutputExists(_) => 2,
            CliError::Sim(SimError::Config(_)) => 2,
            _ => 1,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            kind: self.kind(),
            message: self.to_string(),
        }
    }
}
