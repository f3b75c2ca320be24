//! Independent schedule-validity checker.
//!
//! Deliberately shares no code with the scheduler: it only reads the
//! profile and the finished record.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use crate::profile::{JobProfile, PeId, ResourceProfile, TaskId};
use crate::scalar::{total_cmp, Scalar};
use crate::schedule::ScheduleRecord;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Duplicate { job: u64, task: TaskId },
    Overlap { pe: PeId, first: (u64, TaskId), second: (u64, TaskId) },
    Precedence { job: u64, task: TaskId, pred: TaskId, start: f64, earliest: f64 },
    MissingPredecessor { job: u64, task: TaskId, pred: TaskId },
    Unsupported { job: u64, task: TaskId, pe: PeId },
    BadInterval { job: u64, task: TaskId },
    IncompleteJob { job: u64, missing: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    /// Require every job in the record to have all of its tasks.
    pub require_complete_jobs: bool,
    /// Require `finish - start` to equal the nominal execution time.
    pub nominal_durations: bool,
}

/// Checks per-PE non-overlap, precedence with cross-PE communication cost,
/// supported placement, and that every task appears at most once. Returns
/// every violation found, in a deterministic order.
pub fn verify_schedule<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    record: &ScheduleRecord<T>,
    opts: VerifyOptions,
) -> Vec<Violation> {
    let tol = 1e-9;
    let mut out = Vec::new();
    let mut by_key = BTreeMap::new();
    for e in &record.entries {
        match by_key.entry((e.job, e.task)) {
            Entry::Occupied(_) => out.push(Violation::Duplicate { job: e.job, task: e.task }),
            Entry::Vacant(v) => {
                v.insert(e);
            }
        }
    }

    let mut per_pe: BTreeMap<PeId, Vec<_>> = BTreeMap::new();
    for e in &record.entries {
        per_pe.entry(e.pe).or_default().push(*e);
    }
    for e in by_key.values() {
        let spec = job.task(e.task);
        let nominal = resources.exec_time(spec, e.pe);
        let ok_interval = e.start.is_finite() && e.finish.is_finite() && e.finish > e.start;
        match nominal {
            None => out.push(Violation::Unsupported { job: e.job, task: e.task, pe: e.pe }),
            Some(w) if opts.nominal_durations && ((e.finish - e.start) - w).abs().as_f64() > tol => {
                out.push(Violation::BadInterval { job: e.job, task: e.task })
            }
            _ if !ok_interval => out.push(Violation::BadInterval { job: e.job, task: e.task }),
            _ => {}
        }
    }

    for (pe, mut v) in per_pe {
        v.sort_by(|a, b| total_cmp(a.start, b.start));
        for w in v.windows(2) {
            if w[1].start.as_f64() < w[0].finish.as_f64() - tol {
                out.push(Violation::Overlap {
                    pe,
                    first: (w[0].job, w[0].task),
                    second: (w[1].job, w[1].task),
                });
            }
        }
    }

    for e in by_key.values() {
        for &(pred, comm) in job.predecessors(e.task) {
            match by_key.get(&(e.job, pred)) {
                None => out.push(Violation::MissingPredecessor { job: e.job, task: e.task, pred }),
                Some(p) => {
                    let earliest = if p.pe == e.pe { p.finish } else { p.finish + comm };
                    if e.start.as_f64() < earliest.as_f64() - tol {
                        out.push(Violation::Precedence {
                            job: e.job,
                            task: e.task,
                            pred,
                            start: e.start.as_f64(),
                            earliest: earliest.as_f64(),
                        });
                    }
                }
            }
        }
    }

    if opts.require_complete_jobs {
        let jobs: BTreeSet<u64> = by_key.keys().map(|k| k.0).collect();
        for j in jobs {
            let have = by_key.range((j, 0)..=(j, TaskId::MAX)).count();
            if have != job.len() {
                out.push(Violation::IncompleteJob { job: j, missing: job.len() - have });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Pe, TaskSpec};
    use crate::schedule::{Placement, TaskKey};

    fn chain() -> (JobProfile<f64>, ResourceProfile) {
        let job = JobProfile::new(
            "c",
            vec![TaskSpec::new(0).with_exec(1, 2.0), TaskSpec::new(1).with_exec(1, 3.0).with_pred(0, 5.0)],
        )
        .unwrap();
        let res = ResourceProfile::new(vec![Pe { id: 0, rtype: 1 }, Pe { id: 1, rtype: 1 }]).unwrap();
        (job, res)
    }

    #[test]
    fn comm_cost_only_across_pes() {
        let (job, res) = chain();
        let mut r = ScheduleRecord::new();
        r.push(TaskKey::new(0, 0), Placement { pe: 0, start: 0.0, finish: 2.0 });
        r.push(TaskKey::new(0, 1), Placement { pe: 0, start: 2.0, finish: 5.0 });
        assert!(verify_schedule(&job, &res, &r, VerifyOptions::default()).is_empty());

        let mut r = ScheduleRecord::new();
        r.push(TaskKey::new(0, 0), Placement { pe: 0, start: 0.0, finish: 2.0 });
        r.push(TaskKey::new(0, 1), Placement { pe: 1, start: 2.0, finish: 5.0 });
        let v = verify_schedule(&job, &res, &r, VerifyOptions::default());
        assert!(matches!(v[0], Violation::Precedence { earliest, .. } if earliest == 7.0));
    }

    #[test]
    fn overlap_and_duplicate() {
        let (job, res) = chain();
        let mut r = ScheduleRecord::new();
        r.push(TaskKey::new(0, 0), Placement { pe: 0, start: 0.0, finish: 2.0 });
        r.push(TaskKey::new(1, 0), Placement { pe: 0, start: 1.0, finish: 3.0 });
        r.push(TaskKey::new(1, 0), Placement { pe: 1, start: 1.0, finish: 3.0 });
        let v = verify_schedule(&job, &res, &r, VerifyOptions::default());
        assert!(v.iter().any(|x| matches!(x, Violation::Duplicate { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Overlap { pe: 0, .. })));
    }
}
