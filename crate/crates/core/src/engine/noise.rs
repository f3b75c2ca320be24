//! Random processes of the simulator: exponential job inter-arrival gaps and
//! Gaussian perturbation of execution times.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::profile::{mean_exec_time, PeId, ResourceProfile, TaskSpec};
use crate::scalar::Scalar;

/// Gaussian execution-time noise. The standard deviation of a task's draw
/// is `sigma_fraction` times the task's mean execution time over supporting
/// PEs; draws are clamped below at `floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub sigma_fraction: T,
    pub floor: T,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn none() -> Self {
        Self { sigma_fraction: T::zero(), floor: T::of(1e-3) }
    }

    pub fn with_sigma(sigma_fraction: T) -> Self {
        Self { sigma_fraction, ..Self::none() }
    }
}

impl<T: Scalar> Default for NoiseModel<T> {
    fn default() -> Self {
        Self::none()
    }
}

/// Execution time of `task` on `pe` for one run: nominal time plus
/// `N(0, (σ·w̄)²)`, clamped to `noise.floor`. With `σ = 0` the nominal time
/// is returned unchanged and no random number is consumed.
pub fn draw_exec_time<T: Scalar, R: Rng + ?Sized>(
    task: &TaskSpec<T>,
    pe: PeId,
    resources: &ResourceProfile,
    noise: &NoiseModel<T>,
    rng: &mut R,
) -> Result<T, SimError> {
    let nominal =
        resources.exec_time(task, pe).ok_or(SimError::UnsupportedPlacement { task: task.id, pe })?;
    if noise.sigma_fraction <= T::zero() {
        return Ok(nominal);
    }
    let mean = mean_exec_time(task, resources).expect("supported on this pe");
    let sd = (noise.sigma_fraction * mean).as_f64();
    let eps: f64 = Normal::new(0.0, sd).expect("finite sd").sample(rng);
    Ok((nominal + T::of(eps)).max(noise.floor))
}

/// Exponential inter-arrival process with mean `scale`.
#[derive(Debug, Clone)]
pub struct ArrivalProcess {
    dist: Option<Exp<f64>>,
}

impl ArrivalProcess {
    /// `None` (or an infinite scale) disables arrivals.
    pub fn new<T: Scalar>(scale: Option<T>) -> Self {
        let dist = scale
            .filter(|s| s.is_finite() && *s > T::zero())
            .map(|s| Exp::new(1.0 / s.as_f64()).expect("positive rate"));
        Self { dist }
    }

    pub fn enabled(&self) -> bool {
        self.dist.is_some()
    }

    pub fn next_gap<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Option<T> {
        self.dist.as_ref().map(|d| T::of(d.sample(rng)))
    }
}
