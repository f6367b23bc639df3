//! CLI-level error type.
//!
//! Every failure surfaces as one line on stderr in the form
//! `error[<class>]: <detail>` so scripts can branch on the class without
//! parsing prose. Engine errors pass through with their own message;
//! everything the CLI adds (files, parsing, checkpoints, configuration)
//! carries the offending path and, for parse errors, the line number.

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] heartgan_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Parse {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("{detail}")]
    Checkpoint { detail: String },
    #[error("{detail}")]
    Config { detail: String },
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn parse(path: impl AsRef<Path>, line: usize, detail: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            detail: detail.into(),
        }
    }

    pub fn checkpoint(detail: impl Into<String>) -> Self {
        CliError::Checkpoint { detail: detail.into() }
    }

    pub fn config(detail: impl Into<String>) -> Self {
        CliError::Config { detail: detail.into() }
    }

    /// Stable machine-readable class for the stderr diagnostic.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                heartgan_core::Error::ShapeMismatch { .. } => "shape",
                heartgan_core::Error::InvalidArgument { .. } => "invalid",
                heartgan_core::Error::Degenerate { .. } => "degenerate",
                heartgan_core::Error::NonFinite { .. } => "non-finite",
                heartgan_core::Error::UnknownRecord { .. } => "unknown-record",
            },
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Checkpoint { .. } => "checkpoint",
            CliError::Config { .. } => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
