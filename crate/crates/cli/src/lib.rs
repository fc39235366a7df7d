//! Command-line harness: parses a flat run configuration, dispatches to the
//! experiment and writes a self-describing run directory.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_text, Experiment, FlagOverrides, RunConfig};
pub use error::{CliError, ConfigError, ErrorRecord};
pub use run::run;
