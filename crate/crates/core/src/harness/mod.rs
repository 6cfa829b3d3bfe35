//! Experiment orchestration: configuration, sweeps, CSV and SVG output.

pub mod config;
pub mod demo;
pub mod experiment;
pub mod plot;
pub mod table;

pub use config::{ExperimentConfig, Scheme, Sweep};
pub use experiment::{bounds_table, run_experiment, run_experiment_with_workers, run_trials, TrialRecord};
pub use plot::plot_svg;
pub use table::{emit_csv, RateMemoryTable, TableRow};
