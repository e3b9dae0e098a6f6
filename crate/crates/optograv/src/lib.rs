//! Master-equation reference solver, run configuration and output formats
//! for the `optograv` command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;

pub use error::{OracleError, OracleResult};
