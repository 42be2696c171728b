//! Library side of the `maxlenqm` executable.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod state_spec;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
