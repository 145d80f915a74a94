use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::{RunConfig, RunMetrics};
use crate::kbs::{RadarConstants, TaskSpec};
use crate::packing::{Container, PackingSolution};
use crate::qram::{
    aft, allocate, concave_majorant_from_origin, fast_traversal_single, initial_point, Allocation, AllocationMode,
    CoupledEvaluator, Evaluations, IndexVector, JointMajorant, JointPoint, MajorantPoint, Majorants, ResourceKind,
    SingleTaskEvaluator, TaskMajorant, TaskModel,
};
use crate::scenario::{generate_scene, GeneratedScene, SceneParams};
use crate::{Error, Result};

/// Budget-independent state of one mode on one scene.
pub struct ModeProblem {
    pub mode: AllocationMode,
    /// One model per target, on the grid the mode uses.
    pub models: Vec<TaskModel>,
    pub majorants: Majorants,
    /// Distinct set-points evaluated by the traversals.
    pub eval_count: usize,
    coupled: Option<CoupledEvaluator>,
}

fn mode_spec(spec: &TaskSpec, mode: AllocationMode, consts: &RadarConstants) -> TaskSpec {
    let mut spec = spec.clone();
    if mode == AllocationMode::Full {
        spec.control_grid = spec.control_grid.full_aperture(consts);
    }
    spec
}

/// Task traversal on its own grid from its initial point, with the hull of
/// every feasible point it evaluated.
fn single_task_hull(model: &TaskModel, init: [u16; 4], kind: ResourceKind) -> Result<(Vec<MajorantPoint>, usize)> {
    let mut evals = Evaluations::new(SingleTaskEvaluator::new(model.clone(), kind));
    let trace = fast_traversal_single(&IndexVector::new(init.to_vec()), &mut evals)?;
    let candidates: Vec<MajorantPoint> = evals
        .feasible_points()
        .into_iter()
        .map(|(indices, v, n)| MajorantPoint {
            indices,
            utility: v.utility,
            resource: v.resource,
            evals: n,
        })
        .collect();
    Ok((concave_majorant_from_origin(&candidates), trace.evaluations))
}

fn task_index(idx: &IndexVector) -> [u16; 4] {
    let s = idx.as_slice();
    [s[0], s[1], s[2], s[3]]
}

/// Hull levels of every task after each step of the decoupled greedy merge:
/// segments by descending slope, a task's first segment being its
/// activation. `None` marks a task not yet active.
fn greedy_chain(hulls: &[Vec<MajorantPoint>]) -> Vec<Vec<Option<usize>>> {
    let mut segments = Vec::new();
    for (j, hull) in hulls.iter().enumerate() {
        let mut prev = (0.0, 0.0);
        for (l, p) in hull.iter().enumerate() {
            segments.push(((p.utility - prev.1) / (p.resource - prev.0), j, l));
            prev = (p.resource, p.utility);
        }
    }
    segments.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut level = vec![None; hulls.len()];
    segments
        .into_iter()
        .map(|(_, j, l)| {
            level[j] = Some(l);
            level.clone()
        })
        .collect()
}

impl ModeProblem {
    /// Runs the traversals for `mode`. The majorants are built from every
    /// feasible point a traversal evaluated, not only from the points it
    /// moved through. Targets without any feasible set-point are left out and
    /// never allocated.
    ///
    /// The coupled mode runs two traversals over one memo. The first starts
    /// every task at its initial point. The second starts each task at the
    /// first point of its split-unconstrained hull, the best utility per
    /// resource, so every task that can be useful is active from the start;
    /// from the initial point, tasks stuck at zero utility are only raised
    /// once the others saturate. Cheaper schedules also come from the
    /// split-unconstrained greedy merge: after each of its steps the chosen
    /// set-points are packed together and added as candidates.
    pub fn build(scene: &GeneratedScene, mode: AllocationMode, aft_params: &crate::qram::AftParams) -> Result<Self> {
        let consts = scene.consts;
        let mut models: Vec<TaskModel> = scene
            .targets
            .iter()
            .map(|t| TaskModel::new(t.env, mode_spec(&t.spec, mode, &consts), consts))
            .collect();
        let inits: Vec<Option<[u16; 4]>> = models.iter_mut().map(initial_point).collect();
        let n_tasks = models.len();

        if !mode.is_coupled() {
            let kind = match mode {
                AllocationMode::Full => ResourceKind::Local,
                _ => ResourceKind::Unconstrained,
            };
            let mut tasks = Vec::new();
            let mut eval_count = 0;
            for (k, init) in inits.iter().enumerate() {
                let Some(init) = init else { continue };
                let (hull, n) = single_task_hull(&models[k], *init, kind)?;
                eval_count += n;
                tasks.push(TaskMajorant { task: k, hull });
            }
            return Ok(Self {
                mode,
                models,
                majorants: Majorants::Decoupled { n_tasks, tasks },
                eval_count,
                coupled: None,
            });
        }

        let active: Vec<usize> = (0..n_tasks).filter(|&k| inits[k].is_some()).collect();
        let joint_models: Vec<TaskModel> = active.iter().map(|&k| models[k].clone()).collect();
        let container = Container::new(consts.n_h_total, consts.n_v_total);
        let mut evals = Evaluations::new(CoupledEvaluator::new(joint_models, container));
        let mut eval_count = 0;
        let mut hulls = Vec::with_capacity(active.len());
        let mut starts: Vec<[u16; 4]> = Vec::with_capacity(active.len());
        for &k in &active {
            let init = inits[k].unwrap();
            let (hull, n) = single_task_hull(&models[k], init, ResourceKind::Unconstrained)?;
            eval_count += n;
            starts.push(hull.first().map_or(init, |p| task_index(&p.indices)));
            hulls.push(hull);
        }

        let mut points = Vec::new();
        if !active.is_empty() {
            let cold = IndexVector::new(active.iter().flat_map(|&k| inits[k].unwrap()).collect::<Vec<u16>>());
            let warm = IndexVector::new(starts.concat());
            aft(&cold, aft_params, &mut evals)?;
            if warm != cold {
                aft(&warm, aft_params, &mut evals)?;
            }
            eval_count += evals.distinct();
            // every evaluated point is a candidate, not only the visited ones
            for (indices, v, n) in evals.feasible_points() {
                let (task_utilities, active_resource) = evals
                    .inner_mut()
                    .active(&indices, v.resource)?
                    .ok_or_else(|| Error::Evaluator(format!("evaluated point {indices:?} is infeasible")))?;
                points.push(JointPoint {
                    task_utilities,
                    active_resource,
                    point: MajorantPoint {
                        indices,
                        utility: v.utility,
                        resource: v.resource,
                        evals: n,
                    },
                });
            }
            for levels in greedy_chain(&hulls) {
                let mut keep = vec![false; active.len()];
                let mut task_utilities = vec![0.0; active.len()];
                let mut utility = 0.0;
                let mut parts = starts.clone();
                for (j, level) in levels.iter().enumerate() {
                    if let Some(l) = level {
                        let p = &hulls[j][*l];
                        parts[j] = task_index(&p.indices);
                        keep[j] = true;
                        task_utilities[j] = evals.inner_mut().models[j].evaluate(parts[j]).utility;
                        utility += p.utility;
                    }
                }
                let indices = IndexVector::new(parts.concat());
                let packing = evals
                    .inner_mut()
                    .subset_packing(&indices, &keep)?
                    .ok_or_else(|| Error::Evaluator(format!("hull point {indices:?} is infeasible")))?;
                points.push(JointPoint {
                    task_utilities,
                    active_resource: packing.height,
                    point: MajorantPoint {
                        indices,
                        utility,
                        resource: packing.height,
                        evals: eval_count,
                    },
                });
            }
        }
        Ok(Self {
            mode,
            models,
            majorants: Majorants::Coupled {
                n_tasks,
                tasks: active,
                majorant: JointMajorant::from_points(points),
            },
            eval_count,
            coupled: Some(evals.into_inner()),
        })
    }

    pub fn allocate(&self, budget: f64) -> Result<Allocation> {
        let a = allocate(&self.majorants, budget, self.mode)?;
        assert!(a.resource <= budget, "allocation spends {} over budget {budget}", a.resource);
        Ok(a)
    }

    /// Mean angular error of the allocated tasks, mrad.
    pub fn mean_error_mrad(&mut self, a: &Allocation) -> Option<f64> {
        let errors: Vec<f64> = a
            .choices
            .iter()
            .enumerate()
            .filter_map(|(k, c)| {
                let c = c.as_ref()?;
                let idx = [c[0], c[1], c[2], c[3]];
                self.models[k].evaluate(idx).quality()
            })
            .collect();
        (!errors.is_empty()).then(|| errors.iter().sum::<f64>() / errors.len() as f64 * 1e3)
    }

    /// Array schedule of an allocation: the packing of the chosen joint point
    /// restricted to the scheduled tasks. Only the coupled mode packs.
    pub fn packing(&mut self, a: &Allocation) -> Result<Option<PackingSolution>> {
        let (Some(evaluator), Majorants::Coupled { tasks, majorant, .. }) = (&mut self.coupled, &self.majorants) else {
            return Ok(None);
        };
        let Some(chosen) = majorant.points.iter().rev().find(|p| p.active_resource <= a.resource) else {
            return Ok(None);
        };
        let keep: Vec<bool> = chosen.task_utilities.iter().map(|&u| u > 0.0).collect();
        let Some(solution) = evaluator.subset_packing(&chosen.point.indices, &keep)? else {
            return Ok(None);
        };
        let mut packing = PackingSolution::default();
        for p in &solution.placements {
            let mut p = *p;
            p.item.id = tasks[p.item.id];
            packing.push(p);
        }
        Ok(Some(packing))
    }
}

/// Metrics of one scene under one mode at every budget.
pub fn run_scene(
    scene: &GeneratedScene,
    mode: AllocationMode,
    config: &RunConfig,
    mc_run: u64,
    dump_packing: Option<&Path>,
) -> Result<Vec<RunMetrics>> {
    let start = Instant::now();
    let mut problem = ModeProblem::build(scene, mode, &config.aft)?;
    let mut rows = Vec::with_capacity(config.budgets.len());
    for &budget in &config.budgets {
        let a = problem.allocate(budget)?;
        if let Some(dir) = dump_packing {
            if let Some(p) = problem.packing(&a)? {
                std::fs::write(dir.join(format!("packing_{mode}_run{mc_run}_b{budget}.json")), p.to_json()?)?;
            }
        }
        rows.push(RunMetrics {
            mode,
            scene: config.scene,
            seed: config.seed,
            mc_run,
            budget,
            active_tracks: a.active_tracks(),
            total_utility: a.utility,
            mean_angular_error_mrad: problem.mean_error_mrad(&a),
            wall_time_s: 0.0,
            eval_count: problem.eval_count,
        });
    }
    let elapsed = if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    for r in &mut rows {
        r.wall_time_s = elapsed;
    }
    Ok(rows)
}

/// Scene of Monte Carlo run `mc_run`.
pub fn scene_for(config: &RunConfig, mc_run: u64) -> Result<GeneratedScene> {
    match &config.scene_file {
        Some(path) => GeneratedScene::from_json(&std::fs::read_to_string(path)?),
        None => generate_scene(&SceneParams::new(config.scene, config.n_targets, config.seed, mc_run)),
    }
}

/// Runs every mode on every Monte Carlo scene. Rows come out ordered by mode,
/// then run, then budget, independent of the thread count.
pub fn run_experiment(config: &RunConfig, dump_packing: Option<&Path>) -> Result<Vec<RunMetrics>> {
    config.validate()?;
    let n_mc = if config.scene_file.is_some() { 1 } else { config.n_mc };
    let jobs: Vec<(AllocationMode, u64)> = config
        .modes
        .iter()
        .flat_map(|&m| (0..n_mc as u64).map(move |r| (m, r)))
        .collect();
    let work = || -> Result<Vec<Vec<RunMetrics>>> {
        jobs.par_iter()
            .map(|&(mode, run)| {
                let scene = scene_for(config, run)?;
                let rows = run_scene(&scene, mode, config, run, dump_packing)?;
                eprintln!("{mode} run {run} done ({} evaluations)", rows[0].eval_count);
                Ok(rows)
            })
            .collect()
    };
    let per_job = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    Ok(per_job.into_iter().flatten().collect())
}
