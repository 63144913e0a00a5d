//! File formats, reports and the command-line front end for `ornstein-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod lpformat;
pub mod opsfile;
pub mod report;
pub mod suite;
pub mod witness;

pub use error::{CliError, CliResult};
