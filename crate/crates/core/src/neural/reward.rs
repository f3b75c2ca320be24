use crate::scalar::Scalar;

/// One job's admission time and (if finished) completion time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JobSpan<T> {
    pub start: T,
    pub end: Option<T>,
}

/// `R_t = -(1 / #completed) · Σ_j (ct_j - st_j)` evaluated at time `t`:
/// every job admitted by `t` contributes, unfinished ones with their
/// duration so far. Zero while nothing has completed.
pub fn compute_reward<T: Scalar>(jobs: &[JobSpan<T>], t: T) -> T {
    let mut completed = 0usize;
    let mut total = T::zero();
    for j in jobs.iter().filter(|j| j.start <= t) {
        match j.end {
            Some(ct) if ct <= t => {
                completed += 1;
                total += ct - j.start;
            }
            _ => total += t - j.start,
        }
    }
    if completed == 0 {
        T::zero()
    } else {
        -(total / T::of_usize(completed))
    }
}

/// An agent step as seen by the reward truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTiming<T> {
    pub time: T,
    /// First completion among the tasks this step scheduled (`None` for
    /// no-op steps or if none of them finished).
    pub first_completion: Option<T>,
}

/// `r̃_k = R(min(t_{k+1}, t̂_k))`, with `t_{K+1} = end` for the last step.
pub fn truncate_rewards<T: Scalar>(steps: &[StepTiming<T>], jobs: &[JobSpan<T>], end: T) -> Vec<T> {
    (0..steps.len())
        .map(|k| {
            let next = steps.get(k + 1).map_or(end, |s| s.time);
            let at = match steps[k].first_completion {
                Some(c) if c > steps[k].time => next.min(c),
                _ => next,
            };
            compute_reward(jobs, at)
        })
        .collect()
}

/// Undiscounted reward-to-go.
pub fn returns<T: Scalar>(rewards: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); rewards.len()];
    let mut acc = T::zero();
    for i in (0..rewards.len()).rev() {
        acc += rewards[i];
        out[i] = acc;
    }
    out
}

/// `G_t - b_t` where `b_t` is the mean return at step index `t` over the
/// rollouts still alive at that index. Steps with fewer than two rollouts
/// alive get advantage 0.
pub fn rollout_mean_advantages<T: Scalar>(returns: &[Vec<T>]) -> Vec<Vec<T>> {
    let longest = returns.iter().map(Vec::len).max().unwrap_or(0);
    let mut baseline = vec![None; longest];
    for (t, b) in baseline.iter_mut().enumerate() {
        let alive: Vec<T> = returns.iter().filter_map(|g| g.get(t).copied()).collect();
        if alive.len() >= 2 {
            *b = Some(alive.iter().copied().sum::<T>() / T::of_usize(alive.len()));
        }
    }
    returns
        .iter()
        .map(|g| g.iter().zip(&baseline).map(|(&x, b)| b.map_or(T::zero(), |b| x - b)).collect())
        .collect()
}
