//! Reproducible experiment runner: TOML config in, CSV tables and a JSON
//! summary out.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::RunError;
pub use runner::{run, RunReport};
