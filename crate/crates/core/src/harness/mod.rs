//! Scenario configuration, execution and reporting.

pub mod config;
pub mod fit;
pub mod report;
pub mod scenario;
pub mod snapshot;
pub mod sweep;

pub use config::{apply_override, load_config, parse_config, Scenario, ScenarioConfig, Thresholds, OUTPUT_DIR_ENV};
pub use fit::fit_growth_exponent;
pub use report::{emit_report, Assertion, ReportFiles, RunReport};
pub use scenario::{run_probes, run_scenario, Probe, ProbeRun};
pub use snapshot::{load_snapshot, save_snapshot, Snapshot};
pub use sweep::{expand_sweep, run_all, write_index, SweepPoint};
