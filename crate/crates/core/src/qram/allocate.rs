use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IndexVector, MajorantPoint};
use crate::{Error, Result};

/// How tasks share the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocationMode {
    /// Every task uses the whole array, one after another.
    Full,
    /// Sub-apertures with resource scaled by array share, no scheduling.
    SplitUnconstrained,
    /// Sub-apertures scheduled concurrently by strip packing.
    SplitConstrained,
}

impl AllocationMode {
    pub const ALL: [AllocationMode; 3] = [Self::Full, Self::SplitUnconstrained, Self::SplitConstrained];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::SplitUnconstrained => "split-unconstrained",
            Self::SplitConstrained => "split-constrained",
        }
    }

    pub fn is_coupled(self) -> bool {
        self == Self::SplitConstrained
    }
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AllocationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode {s:?}")))
    }
}

/// Hull of one task in a decoupled mode, anchored at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMajorant {
    pub task: usize,
    pub hull: Vec<MajorantPoint>,
}

/// Point of a joint majorant with its per-task breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPoint {
    pub point: MajorantPoint,
    /// Unweighted utility of every task in the joint space; zero for tasks
    /// left out of the schedule.
    pub task_utilities: Vec<f64>,
    /// Resource once zero-utility tasks are left out and the rest re-packed.
    pub active_resource: f64,
}

/// Joint points by strictly increasing active resource and utility.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JointMajorant {
    pub points: Vec<JointPoint>,
}

impl JointMajorant {
    /// Keeps the points no other point beats on both active resource and
    /// utility.
    pub fn from_points(points: impl IntoIterator<Item = JointPoint>) -> Self {
        let mut all: Vec<JointPoint> = points.into_iter().collect();
        all.sort_by(|a, b| {
            a.active_resource
                .total_cmp(&b.active_resource)
                .then(b.point.utility.total_cmp(&a.point.utility))
        });
        let mut out: Vec<JointPoint> = Vec::new();
        for p in all {
            if out.last().is_none_or(|l| p.point.utility > l.point.utility) {
                out.push(p);
            }
        }
        Self { points: out }
    }
}

/// Budget-independent result of the traversal stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Majorants {
    /// Independent tasks; tasks without a majorant are never allocated.
    Decoupled { n_tasks: usize, tasks: Vec<TaskMajorant> },
    /// One majorant over the joint space of `tasks`, given as original task
    /// numbers in joint order.
    Coupled { n_tasks: usize, tasks: Vec<usize>, majorant: JointMajorant },
}

impl Majorants {
    pub fn n_tasks(&self) -> usize {
        match self {
            Self::Decoupled { n_tasks, .. } | Self::Coupled { n_tasks, .. } => *n_tasks,
        }
    }
}

/// Chosen set-points for one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub mode: AllocationMode,
    /// Per task, its grid indices or `None` when dropped.
    pub choices: Vec<Option<IndexVector>>,
    pub utility: f64,
    pub resource: f64,
}

impl Allocation {
    pub fn active_tracks(&self) -> usize {
        self.choices.iter().filter(|c| c.is_some()).count()
    }
}

fn empty(mode: AllocationMode, n: usize) -> Allocation {
    Allocation {
        mode,
        choices: vec![None; n],
        utility: 0.0,
        resource: 0.0,
    }
}

/// Spends the budget `r_tot` along the majorants.
///
/// Decoupled: all hull segments, each task's activation included, are taken
/// by descending slope until the first one that no longer fits. Coupled: the
/// last majorant point whose active resource fits is chosen and its
/// zero-utility tasks are dropped. Either way the result never spends more
/// than `r_tot` and its utility does not decrease as `r_tot` grows.
pub fn allocate(majorants: &Majorants, r_tot: f64, mode: AllocationMode) -> Result<Allocation> {
    if !(r_tot >= 0.0) {
        return Err(Error::Config(format!("budget must be non-negative, got {r_tot}")));
    }
    match majorants {
        Majorants::Decoupled { .. } if mode.is_coupled() => {
            Err(Error::Config("coupled mode needs a joint majorant".into()))
        }
        Majorants::Coupled { .. } if !mode.is_coupled() => {
            Err(Error::Config(format!("{mode} mode needs per-task majorants")))
        }
        Majorants::Decoupled { n_tasks, tasks } => Ok(allocate_decoupled(*n_tasks, tasks, r_tot, mode)),
        Majorants::Coupled { n_tasks, tasks, majorant } => Ok(allocate_coupled(*n_tasks, tasks, majorant, r_tot, mode)),
    }
}

struct Segment {
    slope: f64,
    task: usize,
    seg: usize,
}

fn allocate_decoupled(n_tasks: usize, tasks: &[TaskMajorant], r_tot: f64, mode: AllocationMode) -> Allocation {
    let mut segments = Vec::new();
    for (t, m) in tasks.iter().enumerate() {
        let mut prev = (0.0, 0.0);
        for (s, p) in m.hull.iter().enumerate() {
            segments.push(Segment {
                slope: (p.utility - prev.1) / (p.resource - prev.0),
                task: t,
                seg: s,
            });
            prev = (p.resource, p.utility);
        }
    }
    segments.sort_by(|a, b| b.slope.total_cmp(&a.slope).then(a.task.cmp(&b.task)).then(a.seg.cmp(&b.seg)));

    let mut level: Vec<Option<usize>> = vec![None; tasks.len()];
    let total = |level: &[Option<usize>]| -> (f64, f64) {
        level
            .iter()
            .zip(tasks)
            .filter_map(|(l, m)| l.map(|s| &m.hull[s]))
            .fold((0.0, 0.0), |(g, u), p| (g + p.resource, u + p.utility))
    };
    for s in segments {
        let before = level[s.task];
        level[s.task] = Some(s.seg);
        if total(&level).0 > r_tot {
            level[s.task] = before;
            break;
        }
    }

    let mut out = empty(mode, n_tasks);
    for (l, m) in level.iter().zip(tasks) {
        if let Some(s) = l {
            out.choices[m.task] = Some(m.hull[*s].indices.clone());
        }
    }
    (out.resource, out.utility) = total(&level);
    out
}

fn allocate_coupled(
    n_tasks: usize,
    tasks: &[usize],
    majorant: &JointMajorant,
    r_tot: f64,
    mode: AllocationMode,
) -> Allocation {
    let mut out = empty(mode, n_tasks);
    let Some(chosen) = majorant.points.iter().rev().find(|p| p.active_resource <= r_tot) else {
        return out;
    };
    let dims = if tasks.is_empty() { 0 } else { chosen.point.indices.len() / tasks.len() };
    for (j, &task) in tasks.iter().enumerate() {
        if chosen.task_utilities[j] > 0.0 {
            let slice = &chosen.point.indices.as_slice()[j * dims..(j + 1) * dims];
            out.choices[task] = Some(IndexVector::new(slice.to_vec()));
        }
    }
    out.utility = chosen.point.utility;
    out.resource = chosen.active_resource;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(i: u16, g: f64, u: f64) -> MajorantPoint {
        MajorantPoint {
            indices: IndexVector::new(vec![i]),
            utility: u,
            resource: g,
            evals: 0,
        }
    }

    fn two_tasks() -> Majorants {
        // task 0: slopes 2.0 then 0.5; task 1: slopes 1.0 then 0.25
        Majorants::Decoupled {
            n_tasks: 3,
            tasks: vec![
                TaskMajorant {
                    task: 0,
                    hull: vec![mp(0, 0.1, 0.2), mp(1, 0.3, 0.3)],
                },
                TaskMajorant {
                    task: 2,
                    hull: vec![mp(0, 0.2, 0.2), mp(1, 0.6, 0.3)],
                },
            ],
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in AllocationMode::ALL {
            assert_eq!(m.to_string().parse::<AllocationMode>().unwrap(), m);
        }
        assert!("split".parse::<AllocationMode>().is_err());
    }

    #[test]
    fn zero_budget_allocates_nothing() {
        let a = allocate(&two_tasks(), 0.0, AllocationMode::Full).unwrap();
        assert_eq!(a.active_tracks(), 0);
        assert_eq!(a.utility, 0.0);
        assert_eq!(a.resource, 0.0);
    }

    #[test]
    fn large_budget_takes_every_segment() {
        let a = allocate(&two_tasks(), 10.0, AllocationMode::Full).unwrap();
        assert_eq!(a.active_tracks(), 2);
        assert!((a.utility - 0.6).abs() < 1e-15);
        assert!((a.resource - 0.9).abs() < 1e-15);
        assert_eq!(a.choices[1], None);
    }

    #[test]
    fn budget_between_activations_picks_the_steeper_task() {
        let a = allocate(&two_tasks(), 0.15, AllocationMode::SplitUnconstrained).unwrap();
        assert_eq!(a.choices[0], Some(IndexVector::new(vec![0u16])));
        assert_eq!(a.choices[2], None);
        assert!((a.utility - 0.2).abs() < 1e-15);

        // exhaustive check over both hulls plus "off"
        let Majorants::Decoupled { tasks, .. } = two_tasks() else { unreachable!() };
        let opts = |m: &TaskMajorant| {
            let mut v = vec![(0.0, 0.0)];
            v.extend(m.hull.iter().map(|p| (p.resource, p.utility)));
            v
        };
        let best = opts(&tasks[0])
            .iter()
            .flat_map(|a| opts(&tasks[1]).into_iter().map(move |b| (a.0 + b.0, a.1 + b.1)))
            .filter(|(g, _)| *g <= 0.15)
            .map(|(_, u)| u)
            .fold(0.0, f64::max);
        assert_eq!(a.utility, best);
    }

    #[test]
    fn decoupled_utility_is_monotone_in_budget() {
        let mut last = 0.0;
        for i in 0..=100 {
            let a = allocate(&two_tasks(), i as f64 / 100.0, AllocationMode::Full).unwrap();
            assert!(a.resource <= i as f64 / 100.0);
            assert!(a.utility >= last);
            last = a.utility;
        }
    }

    fn joint(idx: Vec<u16>, g: f64, active: f64, u: f64, tu: Vec<f64>) -> JointPoint {
        JointPoint {
            point: MajorantPoint {
                indices: IndexVector::new(idx),
                utility: u,
                resource: g,
                evals: 0,
            },
            task_utilities: tu,
            active_resource: active,
        }
    }

    #[test]
    fn coupled_walks_to_last_fitting_point_and_drops_idle_tasks() {
        let m = JointMajorant::from_points([
            joint(vec![0, 0, 0, 0], 0.2, 0.1, 0.3, vec![0.6, 0.0]),
            joint(vec![1, 0, 0, 0], 0.25, 0.2, 0.2, vec![0.4, 0.0]),
            joint(vec![1, 0, 1, 1], 0.5, 0.5, 0.8, vec![0.6, 1.0]),
        ]);
        assert_eq!(m.points.len(), 2);
        let maj = Majorants::Coupled {
            n_tasks: 3,
            tasks: vec![0, 2],
            majorant: m,
        };
        let a = allocate(&maj, 0.3, AllocationMode::SplitConstrained).unwrap();
        assert_eq!(a.choices, vec![Some(IndexVector::new(vec![0u16, 0])), None, None]);
        assert_eq!(a.resource, 0.1);
        let a = allocate(&maj, 0.5, AllocationMode::SplitConstrained).unwrap();
        assert_eq!(a.active_tracks(), 2);
        assert_eq!(a.choices[2], Some(IndexVector::new(vec![1u16, 1])));
        assert!(allocate(&maj, 0.05, AllocationMode::SplitConstrained).unwrap().choices.iter().all(Option::is_none));
    }

    #[test]
    fn mode_must_match_majorant_kind() {
        assert!(allocate(&two_tasks(), 1.0, AllocationMode::SplitConstrained).is_err());
        assert!(allocate(&two_tasks(), -1.0, AllocationMode::Full).is_err());
    }
}
