//! Experiment harness for minipatch top-k feature ranking: configuration,
//! deterministic CSV reporting, and the `simulate`, `validate-theory`,
//! `rank` and `generate` commands.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

/// Harness errors, split by exit code: configuration problems exit with 2,
/// data and I/O problems with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}
