//! Configuration parsing, run manifests, CSV output and the experiment
//! registry behind the command-line tool.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod registry;

pub use config::ExperimentConfig;
pub use manifest::RunManifest;
pub use registry::{execute, find_experiment, Experiment, EXPERIMENTS};
