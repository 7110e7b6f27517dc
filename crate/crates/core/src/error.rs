//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors raised by dataset handling, model training, the optimizers and the
/// experiment runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration (bad rates, missing fields, malformed spec files).
    #[error("config error: {0}")]
    Config(String),

    /// Dataset-level failure: unreadable file, bad schema, unparseable cells.
    #[error("data error: {0}")]
    Data(String),

    /// CSV parse failure at a specific line of the input file.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Model training or prediction failure.
    #[error("model error: {0}")]
    Model(String),

    /// Anything that fails after configuration and data loading succeeded.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl Error {
    /// Process exit code for the CLI: 1 config, 2 data, 3 runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) | Error::Parse { .. } => 2,
            Error::Model(_) | Error::Runtime(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
