//! Experiment driver for the `secnoma` library: reads a run configuration,
//! runs one of the parameter sweeps and writes the results as CSV or
//! JSON together with pass/fail checks.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Command;
pub use config::{Format, RunConfig};
pub use error::CliError;
pub use output::Report;
