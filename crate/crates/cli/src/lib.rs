//! Command-line front end for the BB84 imperfect-device security analysis:
//! error rates, key-rate sweeps, Monte Carlo runs and QBER thresholds.

pub mod commands;
pub mod config;
pub mod output;

/// A command failure carrying the process exit code.
///
/// 2 = input validation, 3 = statistical test failure, 4 = no-key regime.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}
