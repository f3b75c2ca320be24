//! Schedule records shared by the static heuristics, the simulator and the
//! exporters.

use crate::profile::{PeId, TaskId};
use crate::scalar::{total_cmp, Scalar};

/// Identifies one task of one job instance. Orders by `(job, task)`, which
/// is the tie-break used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskKey {
    pub job: u64,
    pub task: TaskId,
}

impl TaskKey {
    pub const fn new(job: u64, task: TaskId) -> Self {
        Self { job, task }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement<T> {
    pub pe: PeId,
    pub start: T,
    pub finish: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry<T> {
    pub job: u64,
    pub task: TaskId,
    pub pe: PeId,
    pub start: T,
    pub finish: T,
}

impl<T: Scalar> ScheduleEntry<T> {
    pub fn key(&self) -> TaskKey {
        TaskKey::new(self.job, self.task)
    }

    pub fn placement(&self) -> Placement<T> {
        Placement { pe: self.pe, start: self.start, finish: self.finish }
    }
}

/// Per-task `(pe, start, finish)` entries in the order they were recorded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScheduleRecord<T> {
    pub entries: Vec<ScheduleEntry<T>>,
}

impl<T: Scalar> ScheduleRecord<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn push(&mut self, key: TaskKey, p: Placement<T>) {
        self.entries.push(ScheduleEntry {
            job: key.job,
            task: key.task,
            pe: p.pe,
            start: p.start,
            finish: p.finish,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Latest finish time, zero for an empty record.
    pub fn makespan(&self) -> T {
        self.entries.iter().map(|e| e.finish).fold(T::zero(), |a, b| a.max(b))
    }

    /// Entries sorted by `(start, pe, job, task)`.
    pub fn sorted(&self) -> Vec<ScheduleEntry<T>> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| total_cmp(a.start, b.start).then(a.pe.cmp(&b.pe)).then(a.key().cmp(&b.key())));
        v
    }
}
