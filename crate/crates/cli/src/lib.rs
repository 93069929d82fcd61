//! Experiment runner around the `eulerlab` library: flat key-value
//! configuration, subcommand dispatch, deterministic CSV/JSON artifacts,
//! and a built-in verification suite.

pub mod config;
pub mod experiments;
pub mod output;
pub mod validate;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, ExperimentConfig};
pub use experiments::{run_experiment, ExperimentResult};
pub use validate::{run_validation, ValidationReport};
