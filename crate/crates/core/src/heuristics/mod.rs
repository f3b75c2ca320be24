//! Static list scheduling: upward ranks, HEFT ordering, the insertion-based
//! EST/EFT PE manager shared by every scheduler, and an exhaustive optimum
//! for small instances.

mod eft;
mod oracle;
mod rank;
mod timeline;

use thiserror::Error;

use crate::profile::TaskId;

pub use eft::{
    data_ready_time, eft_select, eft_select_append, est, heft_static_schedule, FinishedTasks, StaticSchedule,
};
pub use oracle::{brute_force_optimal, DEFAULT_ORACLE_LIMIT};
pub use rank::{compute_rank_u, heft_order, RankTable};
pub use timeline::{Interval, PeTimeline};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("task {task}: predecessor {pred} has no recorded finish time")]
    MissingPredecessor { task: TaskId, pred: TaskId },
    #[error("task {0} is not supported by any PE")]
    Unsupported(TaskId),
    #[error("instance has {tasks} tasks, exhaustive search is limited to {limit}")]
    TooLarge { tasks: usize, limit: usize },
}
