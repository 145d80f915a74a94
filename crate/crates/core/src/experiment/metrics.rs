use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::qram::AllocationMode;
use crate::scenario::SceneVariant;
use crate::Result;

/// One row of the metrics table: one mode, run and budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub mode: AllocationMode,
    pub scene: SceneVariant,
    pub seed: u64,
    pub mc_run: u64,
    pub budget: f64,
    /// Tasks given a non-zero resource.
    pub active_tracks: usize,
    pub total_utility: f64,
    /// Mean angular error over active tracks; empty when there are none.
    pub mean_angular_error_mrad: Option<f64>,
    /// Majorant construction plus all allocations of the run.
    pub wall_time_s: f64,
    /// Distinct set-points evaluated while building the majorants.
    pub eval_count: usize,
}

pub fn write_csv<W: Write>(rows: &[RunMetrics], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunMetrics>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
