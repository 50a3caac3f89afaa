//! Experiment runner for kicked-rotor quantum resonances: configuration,
//! parallel engines, presets and CSV/JSON output on top of `krqr-core`.

pub mod backend;
pub mod cli;
pub mod config;
pub mod engine;
pub mod experiment;
pub mod export;
pub mod presets;

pub use config::{ConfigError, Engine, ExperimentConfig, Scenario};
pub use experiment::{execute, run, ResultBundle, RunError};
