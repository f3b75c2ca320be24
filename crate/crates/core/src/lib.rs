//! Heterogeneous SoC task-scheduling workbench.
//!
//! * [`profile`]: job DAGs and PE inventories, text format, bundled profiles.
//! * [`heuristics`]: upward ranks, HEFT, the insertion-based EFT PE manager
//!   and an exhaustive optimum for small jobs.
//! * [`engine`]: discrete-event life-cycle simulator with job injection,
//!   ready/executable queues, noise and latency accounting.
//! * [`nn`]: dense layers, masked softmax and reverse-mode gradients.
//! * [`neural`]: graph embeddings, the stochastic task-ordering policy and
//!   its actor-critic training loop.
//! * [`harness`]: experiment configuration, sweeps and artifact export.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the simulator and
//! training use.

pub mod engine;
pub mod gen;
pub mod harness;
pub mod heuristics;
pub mod neural;
pub mod nn;
pub mod profile;
pub mod scalar;
pub mod schedule;
pub mod schedulers;
pub mod verify;

pub use scalar::Scalar;
pub use schedule::{Placement, ScheduleEntry, TaskKey};

pub type JobProfile = profile::JobProfile<f64>;
pub type TaskSpec = profile::TaskSpec<f64>;
pub type ScheduleRecord = schedule::ScheduleRecord<f64>;
pub type RankTable = heuristics::RankTable<f64>;
pub type PeTimeline = heuristics::PeTimeline<f64>;
pub type SimConfig = engine::SimConfig<f64>;
pub type Simulator<'a> = engine::Simulator<'a, f64>;
pub type Metrics = engine::Metrics<f64>;
pub type Tensor2 = nn::Tensor2<f64>;
pub type ParamSet = nn::ParamSet<f64>;

/// Single-precision aliases for the scalar-generic math.
pub mod single {
    pub type JobProfile = crate::profile::JobProfile<f32>;
    pub type TaskSpec = crate::profile::TaskSpec<f32>;
    pub type ScheduleRecord = crate::schedule::ScheduleRecord<f32>;
    pub type RankTable = crate::heuristics::RankTable<f32>;
    pub type Tensor2 = crate::nn::Tensor2<f32>;
    pub type ParamSet = crate::nn::ParamSet<f32>;
}
