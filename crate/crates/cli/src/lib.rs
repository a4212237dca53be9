//! Command-line front end: run configuration, data loading, the baseline
//! study, and exhibit generation.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod exhibits;
pub mod study;

pub use commands::{run, Cli, Command};
pub use config::RunConfig;
pub use data::Dataset;
pub use error::CliError;
