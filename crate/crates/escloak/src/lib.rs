//! File formats, configuration and subcommands of the `escloak` CLI.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{Options, OmegaRange, Output};
pub use config::RunConfig;
pub use error::CliError;
pub use output::Format;
