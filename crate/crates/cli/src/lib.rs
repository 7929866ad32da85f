//! Library half of the `wright-poisson` command-line tool.

pub mod args;
pub mod check;
pub mod commands;
pub mod output;

use thiserror::Error;
use wright_poisson::SeriesControl;

pub use args::Cli;
pub use output::{Format, Report};

/// Process exit status, stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailed = 1,
    BadInput = 2,
    MethodDisagreement = 3,
    NonConvergence = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Input(_) => Exit::BadInput,
            CliError::NonConvergence(_) => Exit::NonConvergence,
        }
    }
}

impl From<wright_poisson::Error> for CliError {
    fn from(e: wright_poisson::Error) -> Self {
        if e.is_non_convergence() {
            CliError::NonConvergence(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// A rendered result and the exit status it carries; failures such as method
/// disagreement still print their report.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
    /// Printed to standard error after the report.
    pub message: Option<String>,
}

impl Outcome {
    pub fn ok(report: Report) -> Self {
        Outcome {
            report,
            exit: Exit::Ok,
            message: None,
        }
    }
}

pub fn series_control(cli: &Cli) -> Result<SeriesControl, CliError> {
    Ok(SeriesControl::default()
        .with_rel_tol(cli.rel_tol)?
        .with_max_terms(cli.max_terms)?)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ctrl = series_control(cli)?;
    commands::dispatch(&cli.command, &ctrl, cli.format)
}
