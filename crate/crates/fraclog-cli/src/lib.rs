//! Library half of the `fraclog` command-line tool: config parsing and
//! validation, the command runners, and the CSV/JSON emitters. The binary in
//! `main.rs` is a thin clap wrapper over [`commands`].

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::process::ExitCode;

/// Process-level outcomes. Exit codes: 0 success, 2 configuration error,
/// 3 numerical failure (non-finite state), 1 I/O or internal error.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration; names the offending field.
    Config { field: String, message: String },
    /// A solve aborted on a non-finite state. Outputs are already written
    /// and flagged when this is returned.
    NonFinite { detail: String },
    Io(std::io::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config { .. } => ExitCode::from(2),
            Self::NonFinite { .. } => ExitCode::from(3),
            Self::Io(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config { field, message } => write!(f, "config error in `{field}`: {message}"),
            Self::NonFinite { detail } => write!(f, "numerical failure: {detail}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}
