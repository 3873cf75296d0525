//! Command-line front end: network files, commands and reports.
//!
//! Every command renders a plain-text report that depends only on its
//! arguments and input files. Probabilities are printed with nine decimals.

pub mod commands;
pub mod format;

use std::fmt;

pub use commands::{run, Cli, Command, Outcome, SuiteSelection};

/// A command failure, classified by exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable, malformed or invalid input, or a refused request.
    Invalid(String),
    /// The request exceeds an enumeration budget.
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => f.write_str(msg),
            CliError::Budget(msg) => write!(f, "refused: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<causal_control::error::Error> for CliError {
    fn from(e: causal_control::error::Error) -> Self {
        match e {
            causal_control::error::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// Exit status for a verification run with at least one failing check.
pub const EXIT_VERIFY_FAILED: u8 = 2;
