//! Library side of the `meic` command-line tool: configuration handling and
//! one function per subcommand. `main.rs` only parses arguments.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

/// Errors surfaced to the user, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag, config key or value.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Sim(#[from] meic::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// The run completed but its pass criterion did not hold.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Sim(meic::Error::Domain { .. } | meic::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}
