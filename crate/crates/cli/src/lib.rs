//! Driver for Green's function experiments: configuration, the
//! subcommands and their output files.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

/// Failure classes with distinct process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<rgf_core::Error> for CliError {
    fn from(e: rgf_core::Error) -> Self {
        use rgf_core::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::InvalidModel(_)
            | E::InvalidPlan(_)
            | E::InvalidPerturbation(_)
            | E::GammaOutOfRange(_)
            | E::QubitOutOfRange { .. }
            | E::RegisterTooLarge { .. }
            | E::UnsupportedTerm(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
