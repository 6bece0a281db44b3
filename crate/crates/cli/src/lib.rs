//! Command-line front end: corpus indexing, TREC scoring runs, the
//! verification suite, density estimation and Bloch coordinate export.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod index;

pub use cli::{run, run_args, Cli};
pub use error::{CliError, CliResult};
