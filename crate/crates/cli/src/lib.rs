//! Command-line front end: configuration files, CSV output and the
//! validation suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod validate;

pub use config::{parse_config, ConfigBuilder, RunConfig};
pub use error::CliError;
