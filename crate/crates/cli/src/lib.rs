//! Command-line front end for the height-estimate toolkit: TOML-configured
//! scenario runs that solve the prescribed-curvature equation, evaluate the
//! estimate checks, and emit CSV, JSON, and SVG artifacts.

use cmc_core::solver::SolverError;
use thiserror::Error;

pub mod config;
pub mod output;
pub mod record;
pub mod runner;

pub use record::RunRecord;
pub use runner::{execute, Scenario};

/// Anything that can go wrong in a run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration: unparsable, inconsistent, or out-of-range input.
    #[error("config error: {0}")]
    Config(String),
    /// File-system trouble reading configs or writing artifacts.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// The nonlinear solve failed; a report with the error is still written.
    #[error("solver error: {0}")]
    Solver(#[from] SolverError),
}

impl CliError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Solver(_) => 2,
        }
    }
}
