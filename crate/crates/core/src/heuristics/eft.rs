use std::collections::{BTreeMap, HashMap};

use super::rank::{compute_rank_u, heft_order};
use super::timeline::{Interval, PeTimeline};
use super::ScheduleError;
use crate::profile::{JobProfile, PeId, ResourceProfile};
use crate::scalar::Scalar;
use crate::schedule::{Placement, ScheduleRecord, TaskKey};

/// Actual placements of finished (or already placed) tasks.
pub trait FinishedTasks<T> {
    fn placement(&self, key: TaskKey) -> Option<Placement<T>>;
}

impl<T: Copy> FinishedTasks<T> for HashMap<TaskKey, Placement<T>> {
    fn placement(&self, key: TaskKey) -> Option<Placement<T>> {
        self.get(&key).copied()
    }
}

impl<T: Copy> FinishedTasks<T> for BTreeMap<TaskKey, Placement<T>> {
    fn placement(&self, key: TaskKey) -> Option<Placement<T>> {
        self.get(&key).copied()
    }
}

/// Earliest time all inputs of `key` are available on `pe`: the latest
/// predecessor finish, plus the edge cost when the predecessor ran on a
/// different PE, and never before `reference` (0 statically, the clock in
/// the simulator).
pub fn data_ready_time<T: Scalar, F: FinishedTasks<T> + ?Sized>(
    job: &JobProfile<T>,
    key: TaskKey,
    pe: PeId,
    finished: &F,
    reference: T,
) -> Result<T, ScheduleError> {
    let mut ready = reference;
    for &(pred, comm) in job.predecessors(key.task) {
        let p = finished
            .placement(TaskKey::new(key.job, pred))
            .ok_or(ScheduleError::MissingPredecessor { task: key.task, pred })?;
        let arrival = if p.pe == pe { p.finish } else { p.finish + comm };
        ready = ready.max(arrival);
    }
    Ok(ready)
}

/// `EST(n_i, p_j) = max(avail[j], max_m (AFT(m) + c_mi))`, with the
/// communication term elided when both tasks share the PE.
pub fn est<T: Scalar, F: FinishedTasks<T> + ?Sized>(
    job: &JobProfile<T>,
    key: TaskKey,
    pe: PeId,
    timelines: &[PeTimeline<T>],
    finished: &F,
    reference: T,
) -> Result<T, ScheduleError> {
    Ok(timelines[pe].avail().max(data_ready_time(job, key, pe, finished, reference)?))
}

fn select<T: Scalar, F: FinishedTasks<T> + ?Sized>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    key: TaskKey,
    timelines: &mut [PeTimeline<T>],
    finished: &F,
    reference: T,
    insertion: bool,
) -> Result<Placement<T>, ScheduleError> {
    let task = job.task(key.task);
    let mut best: Option<Placement<T>> = None;
    for (pe, w) in resources.supporting_pes(task) {
        let ready = data_ready_time(job, key, pe, finished, reference)?;
        let start =
            if insertion { timelines[pe].earliest_fit(ready, w) } else { timelines[pe].append_start(ready) };
        let finish = start + w;
        if best.is_none_or(|b| finish < b.finish) {
            best = Some(Placement { pe, start, finish });
        }
    }
    let p = best.ok_or(ScheduleError::Unsupported(key.task))?;
    timelines[p.pe].insert(Interval { start: p.start, finish: p.finish, owner: key });
    Ok(p)
}

/// Maps `key` to the PE with the earliest finish time, inserting into the
/// first idle gap that fits. Ties go to the lowest PE id. The chosen
/// interval is recorded on the timeline.
pub fn eft_select<T: Scalar, F: FinishedTasks<T> + ?Sized>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    key: TaskKey,
    timelines: &mut [PeTimeline<T>],
    finished: &F,
    reference: T,
) -> Result<Placement<T>, ScheduleError> {
    select(job, resources, key, timelines, finished, reference, true)
}

/// Like [`eft_select`] but only ever appends after the last busy interval.
pub fn eft_select_append<T: Scalar, F: FinishedTasks<T> + ?Sized>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    key: TaskKey,
    timelines: &mut [PeTimeline<T>],
    finished: &F,
    reference: T,
) -> Result<Placement<T>, ScheduleError> {
    select(job, resources, key, timelines, finished, reference, false)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSchedule<T> {
    pub record: ScheduleRecord<T>,
    pub makespan: T,
}

/// HEFT on a single job instance: descending upward rank, each task placed
/// by [`eft_select`].
pub fn heft_static_schedule<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
) -> Result<StaticSchedule<T>, ScheduleError> {
    let ranks = compute_rank_u(job, resources);
    let all: Vec<TaskKey> = (0..job.len()).map(|t| TaskKey::new(0, t)).collect();
    let mut timelines = vec![PeTimeline::new(); resources.len()];
    let mut finished: HashMap<TaskKey, Placement<T>> = HashMap::new();
    let mut record = ScheduleRecord::new();
    for key in heft_order(&all, &ranks) {
        let p = eft_select(job, resources, key, &mut timelines, &finished, T::zero())?;
        finished.insert(key, p);
        record.push(key, p);
    }
    let makespan = record.makespan();
    Ok(StaticSchedule { record, makespan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Bundled, TaskSpec};

    fn k(t: usize) -> TaskKey {
        TaskKey::new(0, t)
    }

    fn pair_job(comm: f64) -> JobProfile<f64> {
        JobProfile::new(
            "p",
            vec![TaskSpec::new(0).with_exec(1, 20.0), TaskSpec::new(1).with_exec(1, 5.0).with_pred(0, comm)],
        )
        .unwrap()
    }

    #[test]
    fn entry_task_est_is_zero() {
        let job = pair_job(7.0);
        let tls = vec![PeTimeline::new(); 2];
        let fin: HashMap<TaskKey, Placement<f64>> = HashMap::new();
        assert_eq!(est(&job, k(0), 0, &tls, &fin, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn est_with_and_without_communication() {
        let job = pair_job(7.0);
        let mut tls = vec![PeTimeline::new(); 2];
        tls[1].insert(Interval { start: 0.0, finish: 15.0, owner: TaskKey::new(9, 0) });
        tls[0].insert(Interval { start: 0.0, finish: 15.0, owner: TaskKey::new(9, 1) });
        let mut fin = HashMap::new();
        fin.insert(k(0), Placement { pe: 0, start: 0.0, finish: 20.0 });
        // predecessor on PE 0, candidate PE 1: 20 + 7
        assert_eq!(est(&job, k(1), 1, &tls, &fin, 0.0).unwrap(), 27.0);
        // same PE: max(15, 20)
        assert_eq!(est(&job, k(1), 0, &tls, &fin, 0.0).unwrap(), 20.0);
    }

    #[test]
    fn missing_predecessor_is_an_error() {
        let job = pair_job(1.0);
        let tls = vec![PeTimeline::new(); 1];
        let fin: HashMap<TaskKey, Placement<f64>> = HashMap::new();
        assert_eq!(
            est(&job, k(1), 0, &tls, &fin, 0.0).unwrap_err(),
            ScheduleError::MissingPredecessor { task: 1, pred: 0 }
        );
    }

    #[test]
    fn single_pe_empty_timeline() {
        let job = JobProfile::new("s", vec![TaskSpec::new(0).with_exec(1, 10.0)]).unwrap();
        let res = ResourceProfile::from_types(&[1]).unwrap();
        let mut tls = vec![PeTimeline::new(); 1];
        let fin: HashMap<TaskKey, Placement<f64>> = HashMap::new();
        let p = eft_select(&job, &res, k(0), &mut tls, &fin, 0.0).unwrap();
        assert_eq!((p.pe, p.start, p.finish), (0, 0.0, 10.0));
        assert_eq!(tls[0].intervals().len(), 1);
    }

    #[test]
    fn argmin_of_two_pes() {
        // exec {5, 4}, ESTs {0, 2} -> finishes {5, 6}
        let job = JobProfile::new(
            "two",
            vec![
                TaskSpec::new(0).with_exec(1, 1.0),
                TaskSpec::new(1).with_exec(1, 5.0).with_exec(2, 4.0).with_pred(0, 2.0),
            ],
        )
        .unwrap();
        let res = ResourceProfile::from_types(&[1, 2]).unwrap();
        let mut tls = vec![PeTimeline::new(); 2];
        let mut fin = HashMap::new();
        fin.insert(k(0), Placement { pe: 0, start: -1.0, finish: 0.0 });
        let p = eft_select(&job, &res, k(1), &mut tls, &fin, 0.0).unwrap();
        assert_eq!((p.pe, p.start, p.finish), (0, 0.0, 5.0));
    }

    #[test]
    fn ties_go_to_lowest_pe() {
        let job = JobProfile::new("t", vec![TaskSpec::new(0).with_exec(1, 3.0)]).unwrap();
        let res = ResourceProfile::from_types(&[1, 1, 1]).unwrap();
        let mut tls = vec![PeTimeline::new(); 3];
        let fin: HashMap<TaskKey, Placement<f64>> = HashMap::new();
        assert_eq!(eft_select(&job, &res, k(0), &mut tls, &fin, 0.0).unwrap().pe, 0);
    }

    #[test]
    fn static_examples() {
        let single =
            JobProfile::new("s", vec![TaskSpec::new(0).with_exec(1, 3.0).with_exec(2, 9.0)]).unwrap();
        let res = ResourceProfile::from_types(&[1, 2]).unwrap();
        assert_eq!(heft_static_schedule(&single, &res).unwrap().makespan, 3.0);

        let indep = JobProfile::new(
            "i",
            vec![TaskSpec::new(0).with_exec(1, 5.0), TaskSpec::new(1).with_exec(1, 7.0)],
        )
        .unwrap();
        let one = ResourceProfile::from_types(&[1]).unwrap();
        assert_eq!(heft_static_schedule(&indep, &one).unwrap().makespan, 12.0);
    }

    #[test]
    fn canonical_heft_makespan() {
        // The classic worked example of this DAG reports an 80-unit HEFT
        // schedule.
        let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
        let s = heft_static_schedule(&job, &res).unwrap();
        assert_eq!(s.record.len(), 10);
        assert_eq!(s.makespan, 80.0);
    }

    #[test]
    fn canonical_in_single_precision() {
        let (job, res) = Bundled::Canonical.load::<f32>().unwrap();
        assert_eq!(heft_static_schedule(&job, &res).unwrap().makespan, 80.0f32);
    }
}
