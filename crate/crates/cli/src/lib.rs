//! Subcommand implementations for the `qudit` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    Config(String),
    /// A run failed a numerical or oracle check (exit 3).
    Validation(String),
    /// The brute-force state would exceed the size cap (exit 4).
    SizeCap(String),
    /// I/O and other runtime failures (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::SizeCap(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::SizeCap(m) => write!(f, "size cap: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qudit_net::Error> for CliError {
    fn from(e: qudit_net::Error) -> Self {
        match e {
            qudit_net::Error::SizeCap { .. } => CliError::SizeCap(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
