//! Experiment runner behind the `multl1` binary.

pub mod fnspec;
pub mod report;
pub mod run;

pub use run::{execute, run_rows, Cli, CliError, Command};
