//! Configuration, orchestration and file output for the `bo4lab` tool.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, InitialData, RunConfig};
pub use error::{CliError, Result};
pub use output::{write_outputs, Manifest, RunReport};
pub use run::{execute, run, Outcome};
