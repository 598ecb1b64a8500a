//! File formats, experiment configuration and the command implementations
//! behind the `hcloud` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
