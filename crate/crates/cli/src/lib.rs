//! Batch front end for the battery simulator: config ingestion, named
//! parameter presets, sweep execution and CSV/plot-script emission.

pub mod config;
pub mod output;
pub mod preset;
pub mod sweep;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Sweep(#[from] sweep::SweepError),
    #[error("unknown preset '{name}'; valid names: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("run failed: {0}")]
    Dynamics(#[from] qbsim_core::dynamics::DynamicsError),
    #[error("model error: {0}")]
    Model(#[from] qbsim_core::model::ModelError),
    #[error("could not write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("strict mode: run produced warnings: {0}")]
    StrictWarnings(String),
}
