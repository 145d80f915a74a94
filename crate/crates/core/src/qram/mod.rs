//! Q-RAM allocation over discrete control spaces.
//!
//! A joint control point is an [`IndexVector`] holding, for every task, one
//! index per control dimension. Evaluators map index vectors to a total
//! weighted utility and a total resource; traversals walk the joint space to
//! approximate the concave-majorant of utility versus resource; the allocator
//! then spends a radar time budget greedily along the majorant.

mod allocate;
mod evaluator;
mod hull;
mod index;
mod tracking;
mod traversal;

pub use allocate::{allocate, Allocation, AllocationMode, JointMajorant, JointPoint, Majorants, TaskMajorant};
pub use evaluator::{Evaluations, JointEvaluator, Value};
pub use hull::{concave_majorant, concave_majorant_from_origin};
pub use index::{IndexVector, JointShape};
pub use tracking::{initial_point, CoupledDetail, CoupledEvaluator, ResourceKind, SingleTaskEvaluator, TaskModel};
pub use traversal::{
    aft, fast_traversal_single, fos, marginal_utility, phi, resources_equal, AftParams, MajorantPoint, Traversal,
};
