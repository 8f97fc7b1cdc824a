//! Config-driven experiments: likelihood scans and estimator comparisons, written
//! as CSV and JSON with a manifest.

mod cli;
mod config;
mod output;
mod scenarios;

pub use cli::{cli_main, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};
pub use config::{AnsatzSpec, Arm, ExperimentConfig, GridSpec, NoiseSpec, Scenario};
pub use output::{render, write_outputs, Format};
pub use scenarios::{
    columns, run_compare, run_scan_l, run_scan_pi, run_scenario, CompareRow, ResultTable, ScanLRow, ScanPiRow,
    ScenarioOutput,
};
