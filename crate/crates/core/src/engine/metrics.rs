use serde::{Serialize, Serializer};

use crate::scalar::Scalar;

/// Average job latency, or the distinguished "nothing completed" result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Latency<T> {
    Mean(T),
    NoCompletions,
}

impl<T: Scalar> Latency<T> {
    /// Mean latency, `+∞` when nothing completed.
    pub fn value(self) -> T {
        match self {
            Latency::Mean(v) => v,
            Latency::NoCompletions => T::infinity(),
        }
    }

    pub fn mean(self) -> Option<T> {
        match self {
            Latency::Mean(v) => Some(v),
            Latency::NoCompletions => None,
        }
    }
}

impl<T: Scalar + Serialize> Serialize for Latency<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Latency::Mean(v) => v.serialize(s),
            Latency::NoCompletions => s.serialize_none(),
        }
    }
}

/// `Σ (ct_j − st_j) / #completed` over `(injected_at, completed_at)` pairs.
pub fn average_latency<T: Scalar>(jobs: impl IntoIterator<Item = (T, T)>) -> Latency<T> {
    let (sum, n) = jobs.into_iter().fold((T::zero(), 0usize), |(s, n), (st, ct)| (s + (ct - st), n + 1));
    if n == 0 {
        Latency::NoCompletions
    } else {
        Latency::Mean(sum / T::of_usize(n))
    }
}

/// Episode summary. `completed` and `latency` only count jobs injected at or
/// after the warm-up boundary; `injected` counts every generated job.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct Metrics<T> {
    pub completed: usize,
    pub latency: Latency<T>,
    pub injected: u64,
    pub sim_length: T,
    pub warmup: T,
    pub scale: Option<T>,
    pub seed: u64,
}
