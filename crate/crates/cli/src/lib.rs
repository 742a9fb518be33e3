//! Command-line front end: scenario files, command dispatch and report output.

pub mod commands;
pub mod emit;
pub mod error;
pub mod scenario;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
