//! Scenario configs, CSV output and subcommands for the `hopspin` binary.

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{execute, run, CliError, Command, CommandOutput};
pub use config::{parse_config, ConfigError, ScenarioConfig};
