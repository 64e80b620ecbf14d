//! Seeded Monte Carlo harness: synthetic data, replicated fits, summaries.

pub mod config;
pub mod noise;
pub mod preset;
pub mod runner;
pub mod summary;

pub use config::{ExperimentConfig, MRule, Preset};
pub use noise::NoiseModel;
pub use preset::Problem;
pub use runner::{generate, plan, replicate_seed, run, ExperimentResult, ExperimentRow, Sample};
pub use summary::{bound_check, BoundCheck, BoundMode, Summary};
