//! Baseline task orderers for the simulator.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Simulator, TaskOrderer};
use crate::heuristics::{compute_rank_u, heft_order, RankTable};
use crate::profile::{JobProfile, ResourceProfile};
use crate::scalar::Scalar;
use crate::schedule::TaskKey;

/// Descending upward rank, ties by `(job, task)`.
#[derive(Debug, Clone)]
pub struct HeftOrderer<T> {
    ranks: RankTable<T>,
}

impl<T: Scalar> HeftOrderer<T> {
    pub fn new(job: &JobProfile<T>, resources: &ResourceProfile) -> Self {
        Self { ranks: compute_rank_u(job, resources) }
    }
}

impl<T: Scalar> TaskOrderer<T> for HeftOrderer<T> {
    fn order(&mut self, _sim: &Simulator<'_, T>, ready: &[TaskKey]) -> Vec<TaskKey> {
        heft_order(ready, &self.ranks)
    }
}

/// Oldest job first, then task id.
#[derive(Debug, Clone, Copy, Default)]
pub struct FifoOrderer;

impl<T: Scalar> TaskOrderer<T> for FifoOrderer {
    fn order(&mut self, _sim: &Simulator<'_, T>, ready: &[TaskKey]) -> Vec<TaskKey> {
        let mut v = ready.to_vec();
        v.sort();
        v
    }
}

/// Uniformly random permutation from its own seeded stream.
#[derive(Debug, Clone)]
pub struct RandomOrderer {
    rng: ChaCha8Rng,
}

impl RandomOrderer {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(3);
        Self { rng }
    }
}

impl<T: Scalar> TaskOrderer<T> for RandomOrderer {
    fn order(&mut self, _sim: &Simulator<'_, T>, ready: &[TaskKey]) -> Vec<TaskKey> {
        let mut v = ready.to_vec();
        v.shuffle(&mut self.rng);
        v
    }
}
