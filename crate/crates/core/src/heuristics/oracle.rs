//! Exhaustive minimum makespan for small jobs.
//!
//! Enumerates every (topological order, PE assignment) pair by depth-first
//! search, placing each task with the same insertion rule as the EFT PE
//! manager, and prunes branches whose partial makespan already reaches the
//! best complete schedule. Exponential; only meant for test-sized inputs.

use super::timeline::{Interval, PeTimeline};
use super::ScheduleError;
use crate::profile::{JobProfile, ResourceProfile, TaskId};
use crate::scalar::Scalar;
use crate::schedule::{Placement, TaskKey};

pub const DEFAULT_ORACLE_LIMIT: usize = 8;

struct Search<'a, T> {
    job: &'a JobProfile<T>,
    resources: &'a ResourceProfile,
    placed: Vec<Option<Placement<T>>>,
    pending_preds: Vec<usize>,
    timelines: Vec<PeTimeline<T>>,
    best: T,
}

impl<T: Scalar> Search<'_, T> {
    fn run(&mut self, depth: usize, makespan: T) {
        if makespan >= self.best {
            return;
        }
        if depth == self.job.len() {
            self.best = makespan;
            return;
        }
        for task in 0..self.job.len() {
            if self.placed[task].is_some() || self.pending_preds[task] > 0 {
                continue;
            }
            let spec = self.job.task(task);
            for (pe, w) in self.resources.supporting_pes(spec) {
                let mut ready = T::zero();
                for &(pred, comm) in self.job.predecessors(task) {
                    let p = self.placed[pred].expect("predecessors placed first");
                    ready = ready.max(if p.pe == pe { p.finish } else { p.finish + comm });
                }
                let start = self.timelines[pe].earliest_fit(ready, w);
                let finish = start + w;
                self.place(task, Placement { pe, start, finish });
                self.run(depth + 1, makespan.max(finish));
                self.unplace(task);
            }
        }
    }

    fn place(&mut self, task: TaskId, p: Placement<T>) {
        self.timelines[p.pe].insert(Interval {
            start: p.start,
            finish: p.finish,
            owner: TaskKey::new(0, task),
        });
        self.placed[task] = Some(p);
        for &(succ, _) in self.job.successors(task) {
            self.pending_preds[succ] -= 1;
        }
    }

    fn unplace(&mut self, task: TaskId) {
        let p = self.placed[task].take().unwrap();
        self.timelines[p.pe].remove(TaskKey::new(0, task));
        for &(succ, _) in self.job.successors(task) {
            self.pending_preds[succ] += 1;
        }
    }
}

/// Exact minimum makespan over all list schedules of `job`.
pub fn brute_force_optimal<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    limit: usize,
) -> Result<T, ScheduleError> {
    if job.len() > limit {
        return Err(ScheduleError::TooLarge { tasks: job.len(), limit });
    }
    if let Some(t) = job.tasks().iter().find(|t| resources.supporting_pes(t).next().is_none()) {
        return Err(ScheduleError::Unsupported(t.id));
    }
    let mut search = Search {
        job,
        resources,
        placed: vec![None; job.len()],
        pending_preds: job.tasks().iter().map(|t| t.predecessors.len()).collect(),
        timelines: vec![PeTimeline::new(); resources.len()],
        best: T::infinity(),
    };
    search.run(0, T::zero());
    Ok(search.best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::heft_static_schedule;
    use crate::profile::TaskSpec;

    #[test]
    fn single_task_picks_fast_pe() {
        let job = JobProfile::new("s", vec![TaskSpec::new(0).with_exec(1, 3.0).with_exec(2, 9.0)]).unwrap();
        let res = ResourceProfile::from_types(&[1, 2]).unwrap();
        assert_eq!(brute_force_optimal(&job, &res, 8).unwrap(), 3.0);
    }

    #[test]
    fn parallel_placement() {
        let job = JobProfile::new(
            "p",
            vec![TaskSpec::new(0).with_exec(1, 5.0), TaskSpec::new(1).with_exec(1, 5.0)],
        )
        .unwrap();
        let res = ResourceProfile::from_types(&[1, 1]).unwrap();
        assert_eq!(brute_force_optimal(&job, &res, 8).unwrap(), 5.0);
    }

    #[test]
    fn beats_heft_when_greedy_is_myopic() {
        // A cheap entry task with a costly successor: co-locating everything
        // avoids the transfer HEFT pays.
        let job = JobProfile::new(
            "m",
            vec![
                TaskSpec::new(0).with_exec(1, 2.0).with_exec(2, 1.0),
                TaskSpec::new(1).with_exec(1, 4.0).with_exec(2, 40.0).with_pred(0, 10.0),
            ],
        )
        .unwrap();
        let res = ResourceProfile::from_types(&[1, 2]).unwrap();
        let opt = brute_force_optimal(&job, &res, 8).unwrap();
        let heft = heft_static_schedule(&job, &res).unwrap().makespan;
        assert_eq!(opt, 6.0);
        assert!(opt <= heft);
    }

    #[test]
    fn too_large_rejected() {
        let tasks = (0..9).map(|i| TaskSpec::new(i).with_exec(1, 1.0)).collect();
        let job = JobProfile::new("big", tasks).unwrap();
        let res = ResourceProfile::from_types(&[1]).unwrap();
        assert_eq!(
            brute_force_optimal(&job, &res, DEFAULT_ORACLE_LIMIT).unwrap_err(),
            ScheduleError::TooLarge { tasks: 9, limit: 8 }
        );
    }
}
