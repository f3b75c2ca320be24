use crate::profile::{mean_exec_time, JobProfile, ResourceProfile, TaskId};
use crate::scalar::{total_cmp, Scalar};
use crate::schedule::TaskKey;

/// Upward rank of every task of a job, indexed by task id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable<T> {
    ranks: Vec<T>,
}

impl<T: Scalar> RankTable<T> {
    pub fn get(&self, task: TaskId) -> T {
        self.ranks[task]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.ranks
    }
}

/// `rank_u(i) = w̄_i + max_{j ∈ succ(i)} (c_ij + rank_u(j))`, evaluated in
/// reverse topological order. `w̄_i` is the mean over supporting PEs and
/// `c_ij` the profile edge cost.
pub fn compute_rank_u<T: Scalar>(job: &JobProfile<T>, resources: &ResourceProfile) -> RankTable<T> {
    let mut ranks = vec![T::zero(); job.len()];
    for &i in job.topological_order().iter().rev() {
        let mean = mean_exec_time(job.task(i), resources).expect("every task is supported by some PE");
        let tail = job.successors(i).iter().map(|&(j, c)| c + ranks[j]).fold(T::zero(), |a, b| a.max(b));
        ranks[i] = mean + tail;
    }
    RankTable { ranks }
}

/// Orders ready tasks by descending rank, ties by ascending `(job, task)`.
pub fn heft_order<T: Scalar>(ready: &[TaskKey], ranks: &RankTable<T>) -> Vec<TaskKey> {
    let mut order = ready.to_vec();
    order.sort_by(|a, b| total_cmp(ranks.get(b.task), ranks.get(a.task)).then(a.cmp(b)));
    order
}
