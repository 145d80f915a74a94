//! Monte Carlo budget sweeps over the allocation modes.

mod config;
mod metrics;
mod runner;
mod summary;

use serde::Serialize;

pub use config::{parse_budgets, RunConfig, DEFAULT_BUDGETS};
pub use metrics::{read_csv, write_csv, RunMetrics};
pub use runner::{run_experiment, run_scene, scene_for, ModeProblem};
pub use summary::{summarize, BudgetSummary, Stat};

/// Contents of the JSON file written next to the metrics table.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<'a> {
    pub version: &'static str,
    pub generator: &'static str,
    pub config: &'a RunConfig,
}

impl<'a> Sidecar<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            generator: crate::scenario::GENERATOR,
            config,
        }
    }
}
