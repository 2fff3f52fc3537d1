//! Monte Carlo harness: experiment configuration, seeded trials, aggregation
//! and result emission.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, OutputFormat, ScenarioPoint, Variant};
pub use report::{aggregate, Accumulator, AggregateReport, AggregateRow, CellStats, CSV_COLUMNS};
pub use runner::{
    oracle_check, run_monte_carlo, run_points, run_trial, sweep, trial_channel, trial_seed,
    CellOutcome, CellRecord, OracleRow, RunOutput, TrialReport,
};
