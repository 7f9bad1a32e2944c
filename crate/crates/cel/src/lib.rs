// SPDX-License-Identifier: Apache-2.0

//! Command-line front end of the erasure channel lab: argument parsing,
//! experiment files, report formats and parallel execution.

pub mod cli;
pub mod config;
pub mod output;
pub mod runner;
pub mod selftest;

/// Failure classes with stable exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A check (oracle, pruning, selftest) failed: exit 1.
    #[error("{0}")]
    Check(String),
    /// Bad arguments or input files: exit 2.
    #[error("{0}")]
    Usage(String),
    /// Writing output failed: exit 3.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}
