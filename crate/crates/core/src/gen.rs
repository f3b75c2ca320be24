//! Random job and resource profiles for property tests and benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::profile::{JobProfile, Pe, ResourceProfile, ResourceType, TaskSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DagSpec {
    pub tasks: std::ops::RangeInclusive<usize>,
    /// Probability of an edge `i -> j` for each `i < j`.
    pub edge_prob: f64,
    pub exec: std::ops::RangeInclusive<u32>,
    pub comm: std::ops::RangeInclusive<u32>,
    /// Probability that a task supports a given resource type (at least one
    /// type is always supported).
    pub support_prob: f64,
}

impl Default for DagSpec {
    fn default() -> Self {
        Self { tasks: 1..=6, edge_prob: 0.35, exec: 1..=20, comm: 0..=10, support_prob: 0.6 }
    }
}

/// Random DAG whose tasks only use types present in `types`. Edges always
/// go from a lower to a higher id, so the result is acyclic.
pub fn random_job<T: Scalar, R: Rng + ?Sized>(
    spec: &DagSpec,
    types: &[ResourceType],
    rng: &mut R,
) -> JobProfile<T> {
    let n = rng.random_range(spec.tasks.clone());
    let mut distinct: Vec<ResourceType> = types.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let tasks = (0..n)
        .map(|i| {
            let mut t = TaskSpec::new(i);
            for &ty in &distinct {
                if rng.random_bool(spec.support_prob) {
                    t = t.with_exec(ty, T::of(rng.random_range(spec.exec.clone()) as f64));
                }
            }
            if t.exec_times.is_empty() {
                let ty = *distinct.choose(rng).expect("at least one type");
                t = t.with_exec(ty, T::of(rng.random_range(spec.exec.clone()) as f64));
            }
            for p in 0..i {
                if rng.random_bool(spec.edge_prob) {
                    t = t.with_pred(p, T::of(rng.random_range(spec.comm.clone()) as f64));
                }
            }
            t
        })
        .collect();
    JobProfile::new(format!("random-{n}"), tasks).expect("generated DAG is valid")
}

/// PEs with the given types, ids in order.
pub fn resources(types: &[ResourceType]) -> ResourceProfile {
    ResourceProfile::new(types.iter().enumerate().map(|(id, &rtype)| Pe { id, rtype }).collect())
        .expect("non-empty PE list")
}

/// `pes` PEs drawn from `type_count` types, every type present when
/// `pes >= type_count`.
pub fn random_resources<R: Rng + ?Sized>(pes: usize, type_count: u32, rng: &mut R) -> ResourceProfile {
    let types: Vec<ResourceType> = (0..pes)
        .map(|i| if (i as u32) < type_count { i as u32 + 1 } else { rng.random_range(1..=type_count) })
        .collect();
    resources(&types)
}
