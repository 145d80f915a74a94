//! Evaluators backed by the tracking model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{IndexVector, JointEvaluator, JointShape, Value};
use crate::kbs::{evaluate_task, resource_unconstrained, ControlGrid, Environment, RadarConstants, TaskEvaluation, TaskSpec};
use crate::packing::{sapa_resource, Container, PackingSolution, TaskBox};
use crate::Result;

/// One tracking task with a memo of its evaluated set-points.
#[derive(Debug, Clone)]
pub struct TaskModel {
    pub env: Environment,
    pub spec: TaskSpec,
    pub consts: RadarConstants,
    memo: HashMap<[u16; 4], TaskEvaluation>,
}

impl TaskModel {
    pub fn new(env: Environment, spec: TaskSpec, consts: RadarConstants) -> Self {
        Self {
            env,
            spec,
            consts,
            memo: HashMap::new(),
        }
    }

    pub fn grid(&self) -> &ControlGrid {
        &self.spec.control_grid
    }

    pub fn evaluate(&mut self, idx: [u16; 4]) -> TaskEvaluation {
        let (env, spec, consts) = (&self.env, &self.spec, &self.consts);
        *self
            .memo
            .entry(idx)
            .or_insert_with(|| evaluate_task(&spec.control_grid.point(idx), env, spec, consts))
    }

    /// Sub-aperture `(n_h, n_v)` at `idx`.
    pub fn aperture(&self, idx: [u16; 4]) -> (u32, u32) {
        let p = self.grid().point(idx);
        (p.n_h, p.n_v)
    }

    pub fn resource(&mut self, idx: [u16; 4], kind: ResourceKind) -> Option<f64> {
        let eval = self.evaluate(idx);
        match kind {
            ResourceKind::Local => eval.resource(),
            ResourceKind::Unconstrained => resource_unconstrained(&eval, &self.grid().point(idx), &self.consts),
        }
    }
}

fn task_index(slice: &[u16]) -> [u16; 4] {
    [slice[0], slice[1], slice[2], slice[3]]
}

/// First feasible set-point in graded order: smallest index sum first, ties
/// broken lexicographically with dwell time most significant. A plain
/// lexicographic scan would settle on the most lopsided aperture that clears
/// the SN0 floor, and indices never decrease afterwards.
pub fn initial_point(model: &mut TaskModel) -> Option<[u16; 4]> {
    let [a, b, c, d] = model.grid().sizes();
    for sum in 0..a + b + c + d - 3 {
        for i in 0..a.min(sum + 1) {
            for j in 0..b.min(sum - i + 1) {
                for k in 0..c.min(sum - i - j + 1) {
                    let l = sum - i - j - k;
                    if l >= d {
                        continue;
                    }
                    let idx = [i as u16, j as u16, k as u16, l as u16];
                    let ctrl = model.grid().point(idx);
                    if evaluate_task(&ctrl, &model.env, &model.spec, &model.consts).feasible() {
                        return Some(idx);
                    }
                }
            }
        }
    }
    None
}

/// Task utility `ω·u` with the lower clamp removed.
fn latent_utility(eval: &TaskEvaluation, spec: &TaskSpec) -> f64 {
    let q = eval.quality().unwrap_or(f64::INFINITY);
    spec.weight * ((q - spec.q_min) / (spec.q_max - spec.q_min)).min(1.0)
}

/// Which per-task resource the decoupled modes spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceKind {
    /// Duty fraction of the whole array, as when tasks run one after another.
    Local,
    /// Duty fraction weighted by the share of the array in use.
    Unconstrained,
}

/// A single task on its own 4-dimensional grid. Utility is weighted.
#[derive(Debug, Clone)]
pub struct SingleTaskEvaluator {
    shape: JointShape,
    pub model: TaskModel,
    pub kind: ResourceKind,
}

impl SingleTaskEvaluator {
    pub fn new(model: TaskModel, kind: ResourceKind) -> Self {
        Self {
            shape: JointShape::new([model.grid().sizes()]),
            model,
            kind,
        }
    }
}

impl JointEvaluator for SingleTaskEvaluator {
    fn shape(&self) -> &JointShape {
        &self.shape
    }

    fn evaluate(&mut self, idx: &IndexVector) -> Result<Option<Value>> {
        let i = task_index(idx.as_slice());
        let eval = self.model.evaluate(i);
        Ok(self.model.resource(i, self.kind).map(|resource| Value {
            utility: self.model.spec.weight * eval.utility,
            resource,
            latent: latent_utility(&eval, &self.model.spec),
        }))
    }

    fn task_saturated(&mut self, _task: usize, idx: &IndexVector) -> Result<bool> {
        Ok(self.model.evaluate(task_index(idx.as_slice())).utility >= 1.0)
    }
}

/// Per-task outcome of a joint point after packing.
#[derive(Debug, Clone)]
pub struct CoupledDetail {
    pub evaluations: Vec<TaskEvaluation>,
    pub packing: PackingSolution,
    /// Packing of the tasks with non-zero utility only.
    pub active_packing: PackingSolution,
    pub active_resource: f64,
}

/// All tasks together: each task is a box `(n_h, n_v, g_k)` and the joint
/// resource is the height of their packing on the array.
#[derive(Debug, Clone)]
pub struct CoupledEvaluator {
    shape: JointShape,
    pub models: Vec<TaskModel>,
    pub container: Container,
}

impl CoupledEvaluator {
    pub fn new(models: Vec<TaskModel>, container: Container) -> Self {
        let shape = JointShape::new(models.iter().map(|m| m.grid().sizes()));
        Self {
            shape,
            models,
            container,
        }
    }

    fn boxes(&mut self, idx: &IndexVector) -> Option<(Vec<TaskBox>, Vec<TaskEvaluation>, f64, f64)> {
        let mut boxes = Vec::with_capacity(self.models.len());
        let mut evals = Vec::with_capacity(self.models.len());
        let mut utility = 0.0;
        let mut latent = 0.0;
        for (k, model) in self.models.iter_mut().enumerate() {
            let i = task_index(self.shape.task_slice(idx, k));
            let eval = model.evaluate(i);
            let d = eval.resource()?;
            let (w, h) = model.aperture(i);
            boxes.push(TaskBox::new(k, w, h, d));
            utility += model.spec.weight * eval.utility;
            latent += latent_utility(&eval, &model.spec);
            evals.push(eval);
        }
        Some((boxes, evals, utility, latent))
    }

    /// Packing and per-task figures at `idx`; `None` if any task is
    /// infeasible there.
    pub fn detail(&mut self, idx: &IndexVector) -> Result<Option<CoupledDetail>> {
        let Some((boxes, evaluations, _, _)) = self.boxes(idx) else {
            return Ok(None);
        };
        let (_, packing) = sapa_resource(&boxes, self.container)?;
        let active: Vec<TaskBox> = boxes.into_iter().filter(|b| evaluations[b.id].utility > 0.0).collect();
        let (active_resource, active_packing) = sapa_resource(&active, self.container)?;
        Ok(Some(CoupledDetail {
            evaluations,
            packing,
            active_packing,
            active_resource,
        }))
    }
}

impl CoupledEvaluator {
    /// Packing at `idx` of the tasks `keep` selects, by joint position.
    pub fn subset_packing(&mut self, idx: &IndexVector, keep: &[bool]) -> Result<Option<PackingSolution>> {
        let Some((boxes, _, _, _)) = self.boxes(idx) else {
            return Ok(None);
        };
        let kept: Vec<TaskBox> = boxes.into_iter().filter(|b| keep[b.id]).collect();
        Ok(Some(sapa_resource(&kept, self.container)?.1))
    }

    /// Unweighted task utilities and active resource at `idx`, given the
    /// packed height `resource` there. Only re-packs when some task has zero
    /// utility.
    pub fn active(&mut self, idx: &IndexVector, resource: f64) -> Result<Option<(Vec<f64>, f64)>> {
        let Some((boxes, evaluations, _, _)) = self.boxes(idx) else {
            return Ok(None);
        };
        let utilities: Vec<f64> = evaluations.iter().map(|e| e.utility).collect();
        if utilities.iter().all(|&u| u > 0.0) {
            return Ok(Some((utilities, resource)));
        }
        let active: Vec<TaskBox> = boxes.into_iter().filter(|b| utilities[b.id] > 0.0).collect();
        let (height, _) = sapa_resource(&active, self.container)?;
        Ok(Some((utilities, height)))
    }
}

impl JointEvaluator for CoupledEvaluator {
    fn shape(&self) -> &JointShape {
        &self.shape
    }

    fn evaluate(&mut self, idx: &IndexVector) -> Result<Option<Value>> {
        let Some((boxes, _, utility, latent)) = self.boxes(idx) else {
            return Ok(None);
        };
        let (resource, _) = sapa_resource(&boxes, self.container)?;
        Ok(Some(Value {
            utility,
            resource,
            latent,
        }))
    }

    fn task_saturated(&mut self, task: usize, idx: &IndexVector) -> Result<bool> {
        let i = task_index(self.shape.task_slice(idx, task));
        Ok(self.models[task].evaluate(i).utility >= 1.0)
    }
}
