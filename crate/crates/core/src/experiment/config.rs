use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::qram::{AftParams, AllocationMode};
use crate::scenario::SceneVariant;
use crate::{Error, Result};

pub const DEFAULT_BUDGETS: &str = "0.01:0.01:1.00";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub modes: Vec<AllocationMode>,
    pub scene: SceneVariant,
    pub n_targets: usize,
    pub n_mc: usize,
    pub budgets: Vec<f64>,
    pub seed: u64,
    pub aft: AftParams,
    /// Replay this scene instead of drawing new ones; `n_mc` is then 1.
    pub scene_file: Option<PathBuf>,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    /// When false, wall times are written as zero so output bytes only
    /// depend on the inputs.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(modes: Vec<AllocationMode>, scene: SceneVariant, n_targets: usize, n_mc: usize, seed: u64) -> Self {
        Self {
            modes,
            scene,
            n_targets,
            n_mc,
            budgets: parse_budgets(DEFAULT_BUDGETS).expect("default budget grid"),
            seed,
            aft: AftParams::default(),
            scene_file: None,
            threads: None,
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Config("no allocation mode given".into()));
        }
        if self.n_mc == 0 {
            return Err(Error::Config("at least one Monte Carlo run is needed".into()));
        }
        if self.budgets.is_empty() || self.budgets.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
            return Err(Error::Config("budgets must lie in (0, 1]".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        self.aft.validate()
    }
}

/// Parses `a,b,c` or `start:step:end` (end included up to rounding).
pub fn parse_budgets(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse budget grid {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if !(step > 0.0) || end < start {
                return Err(bad());
            }
            let n = ((end - start) / step + 1e-9).floor() as usize;
            // snap to the decimal grid the user typed
            Ok((0..=n).map(|i| round12(start + step * i as f64)).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
