//! File formats, report types and the order-4 catalogue behind the
//! `spisep` command.

pub mod catalogue;
pub mod commands;
pub mod io;

use thiserror::Error;

/// Failures mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<spisep_core::Error> for CliError {
    fn from(e: spisep_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Precondition(e.to_string())
        }
    }
}
