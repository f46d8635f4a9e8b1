//! Scenario configuration, execution and output files.

pub mod config;
pub mod output;
pub mod report;
pub mod runner;

pub use config::{load_config, parse_config, ScenarioConfig, TuningConfig};
pub use output::{emit_outputs, summarize_reports, write_gramian, FilterSummary};
pub use report::{EpochRecord, RunReport, RunSummary};
pub use runner::{run_filter, run_scenario, run_single, simulate_run};
