//! Experiment runner: TOML configs in, chains and diagnostics on disk.

pub mod bundled;
pub mod config;
pub mod run;

pub use config::{ConfigError, ExperimentConfig};
pub use run::{run_experiment, Summary};
