//! Experiment harness for random shadows of `ℓ_p` balls.
//!
//! A run reads an [`config::ExperimentConfig`], dispatches to one of the
//! subcommands in [`commands`], and persists CSV tables plus a JSON summary of
//! [`records::ExperimentRecord`]s. Replicates fan out over a rayon pool; each one
//! draws from its own seed path, so results do not depend on the thread count.

use std::path::{Path, PathBuf};

pub mod commands;
pub mod config;
pub mod output;
pub mod records;

pub use commands::{run, RunReport};
pub use config::{Command, ExperimentConfig};
pub use records::{Assertion, ExperimentRecord};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] shadows_core::Error),
}

impl HarnessError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    /// Process exit status: 1 for configuration and I/O problems, 2 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } => 1,
            HarnessError::Numerical(_) => 2,
        }
    }
}

/// Exit status for failed `--assert` checks.
pub const EXIT_ASSERTION: i32 = 3;
