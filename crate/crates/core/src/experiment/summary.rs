use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RunMetrics;
use crate::qram::AllocationMode;

/// Mean with sample standard deviation; the band is `mean ± 2σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// `None` with fewer than two samples.
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        // shifted sums keep a constant sample exact
        let n = xs.len() as f64;
        let k = xs[0];
        let s1: f64 = xs.iter().map(|x| x - k).sum();
        let s2: f64 = xs.iter().map(|x| (x - k).powi(2)).sum();
        let mean = k + s1 / n;
        let std = (xs.len() >= 2).then(|| ((s2 - s1 * s1 / n) / (n - 1.0)).max(0.0).sqrt());
        Some(Self { mean, std })
    }

    pub fn band(&self) -> Option<(f64, f64)> {
        self.std.map(|s| (self.mean - 2.0 * s, self.mean + 2.0 * s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSummary {
    pub mode: AllocationMode,
    pub budget: f64,
    pub runs: usize,
    pub active_tracks: Stat,
    pub total_utility: Stat,
    /// Over the runs that had at least one active track.
    pub mean_angular_error_mrad: Option<Stat>,
    pub wall_time_s: Stat,
    pub eval_count: Stat,
}

/// Per mode and budget statistics over Monte Carlo runs, ordered by mode then
/// budget.
pub fn summarize(rows: &[RunMetrics]) -> Vec<BudgetSummary> {
    let mut groups: BTreeMap<(AllocationMode, u64), Vec<&RunMetrics>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.mode, r.budget.to_bits())).or_default().push(r);
    }
    let mut out: Vec<BudgetSummary> = groups
        .into_iter()
        .map(|((mode, bits), rs)| {
            let col = |f: &dyn Fn(&RunMetrics) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let errors: Vec<f64> = rs.iter().filter_map(|r| r.mean_angular_error_mrad).collect();
            BudgetSummary {
                mode,
                budget: f64::from_bits(bits),
                runs: rs.len(),
                active_tracks: Stat::of(&col(&|r| r.active_tracks as f64)).unwrap(),
                total_utility: Stat::of(&col(&|r| r.total_utility)).unwrap(),
                mean_angular_error_mrad: Stat::of(&errors),
                wall_time_s: Stat::of(&col(&|r| r.wall_time_s)).unwrap(),
                eval_count: Stat::of(&col(&|r| r.eval_count as f64)).unwrap(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.mode.cmp(&b.mode).then(a.budget.total_cmp(&b.budget)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::SceneVariant;

    fn row(run: u64, budget: f64, util: f64, tracks: usize) -> RunMetrics {
        RunMetrics {
            mode: AllocationMode::Full,
            scene: SceneVariant::Near,
            seed: 1,
            mc_run: run,
            budget,
            active_tracks: tracks,
            total_utility: util,
            mean_angular_error_mrad: None,
            wall_time_s: 0.0,
            eval_count: 5,
        }
    }

    #[test]
    fn constant_metric_has_zero_spread() {
        let s = summarize(&[row(0, 0.5, 0.4, 3), row(1, 0.5, 0.4, 3), row(2, 0.5, 0.4, 3)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].total_utility.std, Some(0.0));
        assert_eq!(s[0].eval_count.band(), Some((5.0, 5.0)));
        assert!(s[0].mean_angular_error_mrad.is_none());
    }

    #[test]
    fn two_runs_average() {
        let s = summarize(&[row(0, 0.5, 0.2, 1), row(1, 0.5, 0.6, 3)]);
        assert!((s[0].total_utility.mean - 0.4).abs() < 1e-15);
        assert_eq!(s[0].active_tracks.mean, 2.0);
    }

    #[test]
    fn single_run_has_no_band() {
        let s = summarize(&[row(0, 0.5, 0.2, 1)]);
        assert_eq!(s[0].total_utility.band(), None);
    }

    #[test]
    fn matches_closed_form() {
        // 1..=n: mean (n+1)/2, variance n(n+1)/12
        let n = 101;
        let xs: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let s = Stat::of(&xs).unwrap();
        assert!((s.mean - 51.0).abs() < 1e-12);
        assert!((s.std.unwrap() - (n as f64 * (n + 1) as f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn groups_by_mode_and_budget() {
        let mut rows = vec![row(0, 0.2, 0.1, 1), row(0, 0.1, 0.05, 1)];
        rows.push(RunMetrics {
            mode: AllocationMode::SplitConstrained,
            ..row(0, 0.1, 0.3, 2)
        });
        let s = summarize(&rows);
        let keys: Vec<_> = s.iter().map(|b| (b.mode, b.budget)).collect();
        assert_eq!(
            keys,
            vec![
                (AllocationMode::Full, 0.1),
                (AllocationMode::Full, 0.2),
                (AllocationMode::SplitConstrained, 0.1)
            ]
        );
    }
}
