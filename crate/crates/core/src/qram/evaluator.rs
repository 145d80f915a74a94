use std::collections::{HashMap, HashSet};

use super::{IndexVector, JointShape};
use crate::Result;

/// Total weighted utility and total resource of a joint point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Value {
    pub utility: f64,
    pub resource: f64,
    /// Utility without the clamp at zero. Only used to order candidates whose
    /// utility gains tie, typically while every task is still below its
    /// worst acceptable quality.
    pub latent: f64,
}

impl Value {
    pub fn new(utility: f64, resource: f64) -> Self {
        Self {
            utility,
            resource,
            latent: utility,
        }
    }
}

/// Maps joint index vectors to `(utility, resource)`.
pub trait JointEvaluator {
    fn shape(&self) -> &JointShape;

    /// `None` when some task is infeasible at its set-point.
    fn evaluate(&mut self, idx: &IndexVector) -> Result<Option<Value>>;

    /// True once `task` has reached full utility at `idx`; its dimensions are
    /// then never incremented.
    fn task_saturated(&mut self, task: usize, idx: &IndexVector) -> Result<bool>;
}

/// Memoizing front-end that also counts evaluations.
///
/// With the cache disabled every request reaches the inner evaluator; the
/// distinct count is the same either way.
pub struct Evaluations<E> {
    inner: E,
    cache: HashMap<IndexVector, (Option<Value>, usize)>,
    seen: HashSet<IndexVector>,
    use_cache: bool,
    calls: usize,
}

impl<E: JointEvaluator> Evaluations<E> {
    pub fn new(inner: E) -> Self {
        Self::with_cache(inner, true)
    }

    pub fn with_cache(inner: E, use_cache: bool) -> Self {
        Self {
            inner,
            cache: HashMap::new(),
            seen: HashSet::new(),
            use_cache,
            calls: 0,
        }
    }

    pub fn shape(&self) -> &JointShape {
        self.inner.shape()
    }

    pub fn value(&mut self, idx: &IndexVector) -> Result<Option<Value>> {
        if self.use_cache {
            if let Some((v, _)) = self.cache.get(idx) {
                return Ok(*v);
            }
        }
        self.inner.shape().check(idx)?;
        let v = self.inner.evaluate(idx)?;
        self.calls += 1;
        if self.use_cache {
            let ordinal = self.cache.len() + 1;
            self.cache.insert(idx.clone(), (v, ordinal));
        } else {
            self.seen.insert(idx.clone());
        }
        Ok(v)
    }

    pub fn saturated(&mut self, task: usize, idx: &IndexVector) -> Result<bool> {
        self.inner.task_saturated(task, idx)
    }

    /// Number of distinct index vectors evaluated.
    pub fn distinct(&self) -> usize {
        if self.use_cache {
            self.cache.len()
        } else {
            self.seen.len()
        }
    }

    /// Every feasible point evaluated so far, in evaluation order, with the
    /// distinct count at the time it was first evaluated. Empty when the
    /// cache is disabled.
    pub fn feasible_points(&self) -> Vec<(IndexVector, Value, usize)> {
        let mut out: Vec<(IndexVector, Value, usize)> = self
            .cache
            .iter()
            .filter_map(|(idx, &(v, n))| v.map(|v| (idx.clone(), v, n)))
            .collect();
        out.sort_by_key(|p| p.2);
        out
    }

    /// Number of calls that reached the inner evaluator.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut E {
        &mut self.inner
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}
