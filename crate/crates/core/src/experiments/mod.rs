//! Reproducible experiments: ε-sweeps, bound checks, volume normalization,
//! configs and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod kokarev;
pub mod quasi_iso;
pub mod sweep;
pub mod volume;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use sweep::{run_sweep, sweep_csv, SweepParams, SweepRow};
