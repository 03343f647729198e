//! Scenario generation, baselines, the end-to-end pipeline, metrics and
//! result export.

pub mod baselines;
pub mod config;
pub mod experiment;
pub mod export;
pub mod metrics;
pub mod scenario;

pub use baselines::{baseline_max_rssi, baseline_random};
pub use config::{ScenarioConfig, SocialKind, UePlacement};
pub use experiment::{run_experiment, run_proposed, ExperimentResult, ProposedOutcome, RunRecord};
pub use export::{export_results, import_summary, ExperimentSummary, ExportPaths};
pub use metrics::{compute_metrics, overhead_bounds, percentile, Approach, ApproachRun, MetricsReport};
pub use scenario::{generate_scenario, Scenario};
