use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Per-task, per-dimension grid indices, concatenated over tasks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexVector(Box<[u16]>);

impl IndexVector {
    pub fn new(indices: impl Into<Box<[u16]>>) -> Self {
        Self(indices.into())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len].into())
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with dimension `dim` incremented by one.
    pub fn bumped(&self, dim: usize) -> Self {
        let mut v = self.0.clone();
        v[dim] += 1;
        Self(v)
    }
}

impl std::ops::Index<usize> for IndexVector {
    type Output = u16;

    fn index(&self, i: usize) -> &u16 {
        &self.0[i]
    }
}

impl fmt::Debug for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Layout of a joint control space: the grid size of every dimension of every
/// task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointShape {
    sizes: Vec<u16>,
    /// Start offset of each task's dimensions, plus a final end sentinel.
    offsets: Vec<usize>,
}

impl JointShape {
    pub fn new<I, T>(tasks: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut sizes = Vec::new();
        let mut offsets = vec![0];
        for t in tasks {
            sizes.extend(t.as_ref().iter().map(|&s| u16::try_from(s).expect("grid dimension too large")));
            offsets.push(sizes.len());
        }
        Self { sizes, offsets }
    }

    pub fn n_tasks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, dim: usize) -> u16 {
        self.sizes[dim]
    }

    pub fn task_dims(&self, task: usize) -> std::ops::Range<usize> {
        self.offsets[task]..self.offsets[task + 1]
    }

    /// Total number of joint points.
    pub fn cardinality(&self) -> f64 {
        self.sizes.iter().map(|&s| s as f64).product()
    }

    pub fn check(&self, idx: &IndexVector) -> Result<()> {
        if idx.len() != self.n_dims() {
            return Err(Error::ShapeMismatch {
                expected: self.n_dims(),
                got: idx.len(),
            });
        }
        if idx.as_slice().iter().zip(&self.sizes).any(|(i, s)| i >= s) {
            return Err(Error::Evaluator(format!("index {idx:?} out of grid bounds")));
        }
        Ok(())
    }

    /// Concatenates per-task index slices.
    pub fn join<'a>(&self, parts: impl IntoIterator<Item = &'a [u16]>) -> IndexVector {
        IndexVector::new(parts.into_iter().flatten().copied().collect::<Vec<_>>())
    }

    pub fn task_slice<'a>(&self, idx: &'a IndexVector, task: usize) -> &'a [u16] {
        &idx.as_slice()[self.task_dims(task)]
    }
}
