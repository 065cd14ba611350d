//! Command-line front end for the separable-state QKD simulator: flat
//! key=value configuration, sweep execution with deterministic CSV output,
//! figure-data presets, and certification/sampler reports.

pub mod config;
pub mod figures;
pub mod report;
pub mod sweep;

pub use config::{parse_config, Column, ConfigError, RunConfig, SweepParam, SweepSpec};
pub use figures::{figure_csv, FigurePreset};
pub use sweep::{sweep_csv, RunError};
