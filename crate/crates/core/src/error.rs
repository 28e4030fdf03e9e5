//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid parameter {field}: {message}")]
    Params { field: String, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("search failed: {0}")]
    Search(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn params(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Params {
            field: field.into(),
            message: msg.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the CLI. 0 is success, 2 is reserved for
    /// argument parsing, and each error class gets its own code so batch
    /// callers can distinguish failure modes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Parse { .. } => 4,
            Error::Validation(_) | Error::Params { .. } => 5,
            Error::Domain(_) | Error::Search(_) => 6,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
