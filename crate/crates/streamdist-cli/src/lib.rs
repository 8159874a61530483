//! Command-line plumbing for streamdist: symbol files, TSV tables and subcommands.

pub mod commands;
pub mod error;
pub mod format;
pub mod tsv;

pub use error::{CliError, CliResult};
