//! Experiment wiring: configuration, dataset/graph/model assembly, command
//! runners, and report files. The `mgtn` binary is a thin shell over this.

pub mod build;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::{apply_overrides, ExperimentConfig, ExperimentKind};
pub use error::{CliError, Result};
