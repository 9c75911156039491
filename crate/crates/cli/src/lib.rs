//! Command-line front end: argument parsing, file formats and subcommands.

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;

pub use cli::Cli;
pub use commands::{run, Output};
pub use error::{CliError, CliResult};
