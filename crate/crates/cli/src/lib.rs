//! Command-line front end: parameter sweeps over the micro-macro schemes,
//! written as CSV or JSON tables.

pub mod args;
pub mod commands;
pub mod output;

use mml_core::{Error as CoreError, NumericPolicy};
use thiserror::Error;

pub use args::{Cli, Command};
pub use output::{Cell, Format, Output, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] CoreError),

    #[error("output failed: {0}")]
    Output(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for bad input or I/O, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(
                CoreError::InvalidParameter { .. }
                | CoreError::InvalidDimension { .. }
                | CoreError::Policy(_),
            ) => 2,
            CliError::Numerical(_) => 3,
            CliError::Config(_) | CliError::Output(_) | CliError::Csv(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Installs the policy from the environment, with `trunc` overriding the
/// starting Fock dimension.
pub fn configure_policy(trunc: Option<usize>) -> Result<()> {
    let mut policy = NumericPolicy::from_env()?;
    if let Some(d) = trunc {
        if d < 2 || d > policy.max_dim {
            return Err(CliError::Config(format!(
                "--trunc must lie in [2, {}], got {d}",
                policy.max_dim
            )));
        }
        policy.default_dim = d;
    }
    NumericPolicy::install(policy)?;
    Ok(())
}

/// Runs `cli` and writes its tables.
pub fn run(cli: &Cli) -> Result<()> {
    let (outputs, common) = commands::execute(&cli.command)?;
    output::emit(&outputs, common.out.as_deref(), common.format)
}
