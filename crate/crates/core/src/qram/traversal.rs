//! First-order and adaptive fast traversal of a joint control space.
//!
//! Both traversals start from a feasible minimal point and repeatedly move to
//! the successor with the largest marginal utility. The adaptive variant also
//! looks one index further along the most promising successors for points of
//! equal resource: such points add utility for free, a discrete jump that the
//! first-order search cannot see.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Evaluations, IndexVector, JointEvaluator, Value};
use crate::{Error, Result};

/// Relative tolerance for treating two resources as equal.
pub const RESOURCE_RTOL: f64 = 1e-9;

const FULL_UTILITY_TOL: f64 = 1e-12;

/// Tuning of the adaptive second-order search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AftParams {
    /// Initial stop fraction of the best marginal utility.
    pub alpha1: f64,
    /// Number of fruitless rounds after which the stop fraction reaches one.
    pub n1: usize,
    /// Maximum first-order points searched per round.
    pub n2: usize,
    /// Maximum equal-resource second-order points kept per searched point.
    pub n3: usize,
}

impl Default for AftParams {
    fn default() -> Self {
        Self {
            alpha1: 0.7,
            n1: 2,
            n2: 3,
            n3: 3,
        }
    }
}

impl AftParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha1 > 0.0 && self.alpha1 <= 1.0 && self.n1 >= 1 && self.n2 >= 1 && self.n3 >= 1 {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid traversal parameters {self:?}")))
        }
    }
}

/// Stop fraction `(1 − α1)·n/n1 + α1`, capped at one.
pub fn phi(n: usize, params: &AftParams) -> f64 {
    ((1.0 - params.alpha1) * n as f64 / params.n1 as f64 + params.alpha1).min(1.0)
}

pub fn resources_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= RESOURCE_RTOL * a.abs().max(b.abs())
}

/// Marginal utility of moving from `current` to `candidate`.
///
/// Equal resource with a utility gain, or any resource decrease without a
/// utility loss, is a free improvement and scores `+∞`; equal resource
/// without gain scores `−∞`.
pub fn marginal_utility(candidate: Value, current: Value) -> f64 {
    let du = candidate.utility - current.utility;
    let dg = candidate.resource - current.resource;
    if resources_equal(candidate.resource, current.resource) {
        if du > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else if dg < 0.0 {
        if du >= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    } else {
        du / dg
    }
}

/// First-order successors: `current + 1_i` for every dimension that is below
/// its grid end and belongs to a task that has not reached full utility.
pub fn fos<E: JointEvaluator>(current: &IndexVector, evals: &mut Evaluations<E>) -> Result<Vec<IndexVector>> {
    let shape = evals.shape().clone();
    let mut out = Vec::new();
    for task in 0..shape.n_tasks() {
        if evals.saturated(task, current)? {
            continue;
        }
        for dim in shape.task_dims(task) {
            if current[dim] + 1 < shape.size(dim) {
                out.push(current.bumped(dim));
            }
        }
    }
    Ok(out)
}

/// A visited joint point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantPoint {
    pub indices: IndexVector,
    pub utility: f64,
    pub resource: f64,
    /// Distinct evaluations performed when the point was reached.
    pub evals: usize,
}

/// Result of a traversal.
#[derive(Debug, Clone, Default)]
pub struct Traversal {
    /// Current points in visiting order.
    pub visited: Vec<MajorantPoint>,
    /// Visited points that no other visited point dominates, by increasing
    /// resource. Utility and resource both increase strictly along it.
    pub path: Vec<MajorantPoint>,
    /// Distinct index vectors evaluated.
    pub evaluations: usize,
}

impl Traversal {
    /// Writes the visited points as CSV rows `step,resource,utility,evals`.
    pub fn write_trace_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "resource", "utility", "evals"])?;
        for (step, p) in self.visited.iter().enumerate() {
            w.serialize((step, p.resource, p.utility, p.evals))?;
        }
        w.flush()?;
        Ok(())
    }

    fn record(&mut self, p: MajorantPoint) {
        let dominated = self
            .path
            .iter()
            .any(|q| q.resource <= p.resource && q.utility >= p.utility);
        if !dominated {
            self.path
                .retain(|q| !(q.resource >= p.resource && q.utility <= p.utility));
            let at = self.path.partition_point(|q| q.resource < p.resource);
            self.path.insert(at, p.clone());
        }
        self.visited.push(p);
    }
}

#[derive(Debug, Clone)]
struct Scored {
    idx: IndexVector,
    value: Value,
    mu: f64,
    latent_mu: f64,
    du: f64,
    dg: f64,
    pos: usize,
}

/// Descending preference: marginal utility, then marginal latent utility,
/// then the smaller resource step, then the larger utility step, then earlier
/// position.
fn preference(a: &Scored, b: &Scored) -> Ordering {
    b.mu.total_cmp(&a.mu)
        .then(b.latent_mu.total_cmp(&a.latent_mu))
        .then(a.dg.total_cmp(&b.dg))
        .then(b.du.total_cmp(&a.du))
        .then(a.pos.cmp(&b.pos))
}

fn score_all<E: JointEvaluator>(set: &[IndexVector], current: Value, evals: &mut Evaluations<E>) -> Result<Vec<Scored>> {
    let mut out = Vec::with_capacity(set.len());
    for (pos, idx) in set.iter().enumerate() {
        if let Some(value) = evals.value(idx)? {
            out.push(Scored {
                idx: idx.clone(),
                value,
                mu: marginal_utility(value, current),
                latent_mu: marginal_utility(
                    Value::new(value.latent, value.resource),
                    Value::new(current.latent, current.resource),
                ),
                du: value.utility - current.utility,
                dg: value.resource - current.resource,
                pos,
            });
        }
    }
    Ok(out)
}

fn best_of(scored: Vec<Scored>) -> Option<Scored> {
    scored.into_iter().min_by(preference)
}

fn sorted(mut scored: Vec<Scored>) -> Vec<Scored> {
    scored.sort_by(preference);
    scored
}

fn start<E: JointEvaluator>(init: &IndexVector, evals: &mut Evaluations<E>) -> Result<(Value, Traversal)> {
    let value = evals.value(init)?.ok_or(Error::InfeasibleInit)?;
    let mut trace = Traversal::default();
    trace.record(MajorantPoint {
        indices: init.clone(),
        utility: value.utility,
        resource: value.resource,
        evals: evals.distinct(),
    });
    Ok((value, trace))
}

fn advance<E: JointEvaluator>(trace: &mut Traversal, next: Scored, evals: &Evaluations<E>) {
    trace.record(MajorantPoint {
        indices: next.idx,
        utility: next.value.utility,
        resource: next.value.resource,
        evals: evals.distinct(),
    });
}

/// First-order traversal: always moves to the best first-order successor.
/// Stops once the total utility is one or no feasible successor is left.
pub fn fast_traversal_single<E: JointEvaluator>(init: &IndexVector, evals: &mut Evaluations<E>) -> Result<Traversal> {
    let (mut cur_value, mut trace) = start(init, evals)?;
    let mut cur = init.clone();
    while cur_value.utility < 1.0 - FULL_UTILITY_TOL {
        let successors = fos(&cur, evals)?;
        let Some(best) = best_of(score_all(&successors, cur_value, evals)?) else {
            break;
        };
        cur = best.idx.clone();
        cur_value = best.value;
        advance(&mut trace, best, evals);
    }
    trace.evaluations = evals.distinct();
    Ok(trace)
}

/// Adaptive fast traversal.
///
/// Each step scores the first-order successors `S'` of the current point.
/// The successors in the search set, best first, are expanded one index
/// further while their marginal utility stays above `φ(n)` times the best
/// (at most `n2` of them); successors of equal resource (at most `n3` per
/// expanded point) join `S'` and become the next search set. `n` grows each
/// round in which none of the added points beats the incumbent, which raises
/// `φ` towards one and narrows the search. When a round adds nothing, the
/// best point of `S'` becomes the current point.
pub fn aft<E: JointEvaluator>(init: &IndexVector, params: &AftParams, evals: &mut Evaluations<E>) -> Result<Traversal> {
    params.validate()?;
    let (mut cur_value, mut trace) = start(init, evals)?;
    let mut cur = init.clone();

    while cur_value.utility < 1.0 - FULL_UTILITY_TOL {
        let mut first = fos(&cur, evals)?;
        let mut search = first.clone();
        let mut members: HashSet<IndexVector> = first.iter().cloned().collect();
        let mut n = 0;

        let chosen = loop {
            let Some(best) = best_of(score_all(&first, cur_value, evals)?) else {
                break None;
            };
            let threshold = phi(n, params) * best.mu;
            let mut added: Vec<IndexVector> = Vec::new();

            for (k, cand) in sorted(score_all(&search, cur_value, evals)?).into_iter().enumerate() {
                if cand.mu < threshold || k + 1 > params.n2 {
                    break;
                }
                let second = fos(&cand.idx, evals)?;
                let equal: Vec<Scored> = score_all(&second, cur_value, evals)?
                    .into_iter()
                    .filter(|s| resources_equal(s.value.resource, cand.value.resource))
                    .collect();
                for (m, s) in sorted(equal).into_iter().enumerate() {
                    if m + 1 > params.n3 {
                        break;
                    }
                    if !members.contains(&s.idx) && !added.contains(&s.idx) {
                        added.push(s.idx);
                    }
                }
            }

            if added.is_empty() {
                break Some(best);
            }
            let gains = score_all(&added, cur_value, evals)?;
            if gains.iter().all(|s| s.mu < best.mu) {
                n += 1;
            }
            members.extend(added.iter().cloned());
            first.extend(added.iter().cloned());
            search = added;
        };

        let Some(best) = chosen else {
            break;
        };
        cur = best.idx.clone();
        cur_value = best.value;
        advance(&mut trace, best, evals);
    }
    trace.evaluations = evals.distinct();
    Ok(trace)
}
