use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Metrics, SimConfig, SimError, Simulator, TaskOrderer, Tick};
use crate::nn::ParamSet;
use crate::profile::{JobProfile, ResourceProfile};
use crate::scalar::Scalar;
use crate::schedule::{ScheduleRecord, TaskKey};

use super::features::{observe, Observation};
use super::model::PolicyNet;
use super::policy::{select_ordering, SelectMode};
use super::reward::{truncate_rewards, JobSpan, StepTiming};

/// One agent step. No-op steps have no observation or action.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<T> {
    pub time: T,
    pub obs: Option<Observation<T>>,
    /// Ordering of `obs.ready` chosen at this step.
    pub action: Option<Vec<usize>>,
    pub log_prob: f64,
    pub entropy: f64,
    /// Truncated reward.
    pub reward: T,
    pub episode: u64,
    pub arrival_seed: u64,
}

impl<T> Transition<T> {
    pub fn is_noop(&self) -> bool {
        self.action.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub transitions: Vec<Transition<T>>,
    pub arrival_seed: u64,
    pub rollout: usize,
    pub metrics: Metrics<T>,
    pub record: ScheduleRecord<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn rewards(&self) -> Vec<T> {
        self.transitions.iter().map(|t| t.reward).collect()
    }

    pub fn total_return(&self) -> T {
        self.transitions.iter().map(|t| t.reward).sum()
    }

    pub fn decisions(&self) -> usize {
        self.transitions.iter().filter(|t| !t.is_noop()).count()
    }
}

struct Pending<T> {
    time: T,
    obs: Option<Observation<T>>,
    action: Option<Vec<usize>>,
    log_prob: f64,
    entropy: f64,
    scheduled: Vec<TaskKey>,
}

/// Task orderer driven by the policy network.
pub struct NeuralOrderer<'n, T: Scalar> {
    net: &'n PolicyNet,
    params: &'n ParamSet<T>,
    mode: SelectMode,
    rng: ChaCha8Rng,
    record: bool,
    steps: Vec<Pending<T>>,
}

impl<'n, T: Scalar> NeuralOrderer<'n, T> {
    pub fn new(net: &'n PolicyNet, params: &'n ParamSet<T>, mode: SelectMode, seed: u64) -> Self {
        Self { net, params, mode, rng: ChaCha8Rng::seed_from_u64(seed), record: false, steps: Vec::new() }
    }

    /// Keeps observations and actions for training.
    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }
}

impl<T: Scalar> TaskOrderer<T> for NeuralOrderer<'_, T> {
    fn order(&mut self, sim: &Simulator<'_, T>, ready: &[TaskKey]) -> Vec<TaskKey> {
        let obs = observe(sim, &self.net.layout, &self.net.config.scales, ready);
        let logits = self.net.logits(self.params, &obs);
        let sel = select_ordering(&logits, self.mode, &mut self.rng);
        let keys: Vec<TaskKey> = sel.order.iter().map(|&i| ready[i]).collect();
        if self.record {
            self.steps.push(Pending {
                time: sim.clock(),
                obs: Some(obs),
                action: Some(sel.order),
                log_prob: sel.log_prob,
                entropy: sel.entropy,
                scheduled: keys.clone(),
            });
        }
        keys
    }

    fn observe(&mut self, _sim: &Simulator<'_, T>, tick: &Tick<T>) {
        // the ready queue emptied without a new decision: a forced no-op
        if self.record && tick.completions > 0 && !tick.scheduled {
            self.steps.push(Pending {
                time: tick.time,
                obs: None,
                action: None,
                log_prob: 0.0,
                entropy: 0.0,
                scheduled: Vec::new(),
            });
        }
    }
}

/// Runs one episode with the policy and returns its trajectory with
/// truncated rewards.
#[allow(clippy::too_many_arguments)]
pub fn run_rollout<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    config: SimConfig<T>,
    net: &PolicyNet,
    params: &ParamSet<T>,
    mode: SelectMode,
    policy_seed: u64,
    episode: u64,
    rollout: usize,
) -> Result<Trajectory<T>, SimError> {
    let arrival_seed = config.seed;
    let end = config.sim_length;
    let mut sim = Simulator::new(job, resources, config)?;
    let mut orderer = NeuralOrderer::new(net, params, mode, policy_seed).recording();
    sim.run(&mut orderer)?;

    let finish: HashMap<TaskKey, T> = sim.record().entries.iter().map(|e| (e.key(), e.finish)).collect();
    let timings: Vec<StepTiming<T>> = orderer
        .steps
        .iter()
        .map(|s| StepTiming {
            time: s.time,
            first_completion: s
                .scheduled
                .iter()
                .filter_map(|k| finish.get(k).copied())
                .reduce(|a, b| a.min(b)),
        })
        .collect();
    let spans = job_spans(&sim);
    let rewards = truncate_rewards(&timings, &spans, end);
    let transitions = orderer
        .steps
        .into_iter()
        .zip(rewards)
        .map(|(s, reward)| Transition {
            time: s.time,
            obs: s.obs,
            action: s.action,
            log_prob: s.log_prob,
            entropy: s.entropy,
            reward,
            episode,
            arrival_seed,
        })
        .collect();
    Ok(Trajectory {
        transitions,
        arrival_seed,
        rollout,
        metrics: sim.metrics(),
        record: sim.record().clone(),
    })
}

/// Spans of every admitted job: completed ones and those still queued.
pub fn job_spans<T: Scalar>(sim: &Simulator<'_, T>) -> Vec<JobSpan<T>> {
    sim.completed_jobs()
        .iter()
        .map(|j| JobSpan { start: j.injected_at, end: Some(j.completed_at) })
        .chain(sim.queued_jobs().map(|j| JobSpan { start: j.injected_at, end: None }))
        .collect()
}
