//! Configuration, runners and writers behind the `jcesd` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, Mode};
pub use error::CliError;
pub use run::{execute, run_dynamics, run_sweep, run_validate};
