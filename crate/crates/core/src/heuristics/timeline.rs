use crate::scalar::Scalar;
use crate::schedule::TaskKey;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub start: T,
    pub finish: T,
    pub owner: TaskKey,
}

/// Occupied `[start, finish)` intervals of one PE, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeTimeline<T> {
    slots: Vec<Interval<T>>,
}

impl<T: Scalar> PeTimeline<T> {
    pub fn new() -> Self {
        Self { slots: Vec::new() }
    }

    pub fn from_intervals(mut slots: Vec<Interval<T>>) -> Self {
        slots.sort_by(|a, b| crate::scalar::total_cmp(a.start, b.start));
        debug_assert!(slots.windows(2).all(|w| w[0].finish <= w[1].start));
        Self { slots }
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.slots
    }

    /// End of the last occupied interval (`avail[j]`), zero when empty.
    pub fn avail(&self) -> T {
        self.slots.last().map_or(T::zero(), |s| s.finish)
    }

    /// Start of the first gap of length `duration` beginning no earlier
    /// than `ready`; falls back to appending after the last interval.
    pub fn earliest_fit(&self, ready: T, duration: T) -> T {
        let mut candidate = ready;
        for s in &self.slots {
            if candidate + duration <= s.start {
                return candidate;
            }
            candidate = candidate.max(s.finish);
        }
        candidate
    }

    /// Append-only start: after everything already on the PE.
    pub fn append_start(&self, ready: T) -> T {
        ready.max(self.avail())
    }

    pub fn insert(&mut self, iv: Interval<T>) {
        let pos = self.slots.partition_point(|s| s.start <= iv.start);
        debug_assert!(pos == 0 || self.slots[pos - 1].finish <= iv.start);
        debug_assert!(pos == self.slots.len() || iv.finish <= self.slots[pos].start);
        self.slots.insert(pos, iv);
    }

    /// Removes the interval owned by `owner`, if any.
    pub fn remove(&mut self, owner: TaskKey) -> Option<Interval<T>> {
        let pos = self.slots.iter().position(|s| s.owner == owner)?;
        Some(self.slots.remove(pos))
    }
}
