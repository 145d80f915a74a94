//! Split-aperture phased array radar resource management for active tracking.
//!
//! The crate is organised bottom-up:
//!
//! - [`kbs`] evaluates the tracking quality, resource and utility of one task
//!   at one control set-point (Van Keuk–Blackman track sharpness model).
//! - [`packing`] schedules concurrent tasks on the array by 3D strip packing
//!   (extreme-point DBLF with shaking); the packed height is the coupled
//!   resource of a task set.
//! - [`qram`] approximates concave-majorants over the discrete control spaces
//!   (first-order and adaptive fast traversal) and allocates a radar time
//!   budget greedily.
//! - [`scenario`] draws randomized target scenes.
//! - [`experiment`] runs Monte Carlo budget sweeps over the three allocation
//!   modes and emits per-run metrics.

pub mod error;
pub mod experiment;
pub mod kbs;
pub mod packing;
pub mod qram;
pub mod scenario;

pub use error::{Error, Result};
