//! CLI driver for the esgkg pipeline: per-stage subcommands plus an
//! end-to-end `pipeline` that persists every intermediate artifact.

pub mod commands;
pub mod config;
pub mod export;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable/invalid input or configuration. Exit code 1.
    #[error("{0}")]
    Input(String),
    /// The completion backend is unusable or every segment failed.
    /// Exit code 2.
    #[error("{0}")]
    Backend(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Backend(_) => 2,
        }
    }
}
