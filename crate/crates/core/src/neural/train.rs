use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{NoiseModel, SimConfig, SimError};
use crate::nn::{Adam, AdamConfig, NnError, ParamSet, Tape, Var};
use crate::profile::{JobProfile, ResourceProfile};
use crate::scalar::Scalar;

use super::features::Observation;
use super::model::{ModelConfig, PolicyNet};
use super::policy::{ordering_log_prob, SelectMode};
use super::reward::{returns, rollout_mean_advantages};
use super::rollout::{run_rollout, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    /// Mean return at each step index over rollouts sharing the arrival
    /// sequence.
    RolloutMean,
    /// Learned value head on the global summary.
    Critic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub scale: f64,
    pub episodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelConfig,
    /// Curriculum, run in order; each stage starts from the previous
    /// stage's parameters.
    pub stages: Vec<Stage>,
    /// Rollouts per arrival sequence.
    pub rollouts: usize,
    pub sim_length: f64,
    pub capacity: usize,
    pub pseudo_steady_state: bool,
    pub sigma: f64,
    pub seed: u64,
    pub lr: f64,
    pub beta_start: f64,
    pub beta_decay: f64,
    pub baseline: BaselineKind,
    pub critic_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            stages: [500.0, 250.0, 100.0, 50.0]
                .into_iter()
                .map(|scale| Stage { scale, episodes: 50 })
                .collect(),
            rollouts: 4,
            sim_length: 2_000.0,
            capacity: 12,
            pseudo_steady_state: true,
            sigma: 0.0,
            seed: 0,
            lr: 1e-3,
            beta_start: 1.0,
            beta_decay: 1e-3,
            baseline: BaselineKind::RolloutMean,
            critic_weight: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn total_episodes(&self) -> u64 {
        self.stages.iter().map(|s| s.episodes).sum()
    }

    /// Entropy weight for a global episode index.
    pub fn beta(&self, episode: u64) -> f64 {
        (self.beta_start - self.beta_decay * episode as f64).max(0.0)
    }

    /// Stage index and scale of a global episode index.
    pub fn stage_of(&self, episode: u64) -> Option<(usize, f64)> {
        let mut end = 0;
        for (i, s) in self.stages.iter().enumerate() {
            end += s.episodes;
            if episode < end {
                return Some((i, s.scale));
            }
        }
        None
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.lr, ..AdamConfig::default() }
    }

    pub fn model_with_baseline(&self) -> ModelConfig {
        let mut m = self.model.clone();
        m.critic = m.critic || self.baseline == BaselineKind::Critic;
        m
    }

    pub fn sim_config<T: Scalar>(&self, scale: f64, arrival_seed: u64) -> SimConfig<T> {
        SimConfig {
            sim_length: T::of(self.sim_length),
            warmup: T::zero(),
            scale: Some(T::of(scale)),
            capacity: self.capacity,
            noise: NoiseModel::with_sigma(T::of(self.sigma)),
            pseudo_steady_state: self.pseudo_steady_state,
            seed: arrival_seed,
            max_jobs: None,
            record_events: false,
        }
    }
}

/// SplitMix64 finalizer folded over `parts`; derives independent seeds
/// from `(base, episode, rollout)` tuples.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9E37_79B9_7F4A_7C15u64, |h, &p| {
        let mut z = h ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

/// Learnable state carried across episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState<T> {
    pub params: ParamSet<T>,
    pub adam: Adam<T>,
    /// Episodes completed so far.
    pub episode: u64,
}

impl<T: Scalar> TrainState<T> {
    pub fn new(params: ParamSet<T>, config: &TrainConfig) -> Self {
        let adam = Adam::new(&params, config.adam());
        Self { params, adam, episode: 0 }
    }

    /// Writes `params.ckpt`, `adam.ckpt` and `train.json` into `dir`.
    pub fn save(&self, dir: &Path, config: &TrainConfig) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("params.ckpt"), self.params.to_text())?;
        std::fs::write(dir.join("adam.ckpt"), self.adam.to_text(&self.params))?;
        let sidecar = Sidecar {
            format: CHECKPOINT_FORMAT,
            episode: self.episode,
            stage: config.stage_of(self.episode).map(|s| s.0),
            config: config.clone(),
        };
        let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
        json.push('\n');
        std::fs::write(dir.join("train.json"), json)
    }

    /// Restores a state saved by [`TrainState::save`] into the layout of
    /// `self` and returns the stored configuration.
    pub fn load(&mut self, dir: &Path) -> Result<TrainConfig, CheckpointError> {
        let (config, episode) = read_checkpoint_config(dir)?;
        self.params.load_text(&std::fs::read_to_string(dir.join("params.ckpt"))?)?;
        self.adam.load_text(&std::fs::read_to_string(dir.join("adam.ckpt"))?)?;
        self.adam.config = config.adam();
        self.episode = episode;
        Ok(config)
    }
}

pub const CHECKPOINT_FORMAT: u32 = 1;

/// Training configuration stored next to a checkpoint.
pub fn read_checkpoint_config(dir: &Path) -> Result<(TrainConfig, u64), CheckpointError> {
    let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(dir.join("train.json"))?)?;
    if sidecar.format != CHECKPOINT_FORMAT {
        return Err(CheckpointError::Version(sidecar.format));
    }
    Ok((sidecar.config, sidecar.episode))
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: u32,
    episode: u64,
    stage: Option<usize>,
    config: TrainConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("checkpoint format {0} is not supported")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tensor(#[from] NnError),
}

/// One decision's contribution to the surrogate objective.
#[derive(Debug, Clone, Copy)]
pub struct PolicyTerm<'a, T> {
    pub obs: &'a Observation<T>,
    pub order: &'a [usize],
    pub advantage: T,
    /// Return, the critic's regression target.
    pub target: T,
}

/// Records `-(Σ A·log π(order) + β·Σ H) · weight` (plus the critic's
/// squared error when the net has one) and returns the loss node.
pub fn surrogate_loss<T: Scalar>(
    net: &PolicyNet,
    params: &ParamSet<T>,
    tape: &mut Tape<T>,
    terms: &[PolicyTerm<'_, T>],
    beta: T,
    critic_weight: T,
    weight: T,
) -> Var {
    let mut parts = Vec::with_capacity(terms.len());
    for term in terms {
        let f = net.forward(tape, params, term.obs);
        let (lp, h) = ordering_log_prob(tape, f.logits, term.order);
        let a = tape.scale(lp, term.advantage);
        let b = tape.scale(h, beta);
        let j = tape.add(a, b);
        parts.push(tape.scale(j, -weight));
        if let Some(v) = f.value {
            let target = tape.constant(crate::nn::Tensor2::filled(1, 1, -term.target));
            let err = tape.add(v, target);
            let sq = tape.mul(err, err);
            parts.push(tape.scale(sq, critic_weight * weight));
        }
    }
    super::policy::sum_scalars(tape, &parts)
}

/// Diagnostics of one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub loss: f64,
    pub mean_return: f64,
    pub mean_entropy: f64,
}

/// Advantages of every transition of every rollout in `group` (rollouts
/// sharing one arrival sequence).
pub fn advantages<T: Scalar>(
    net: &PolicyNet,
    params: &ParamSet<T>,
    group: &[Trajectory<T>],
    baseline: BaselineKind,
) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let rets: Vec<Vec<T>> = group.iter().map(|t| returns(&t.rewards())).collect();
    let adv = match baseline {
        BaselineKind::RolloutMean => rollout_mean_advantages(&rets),
        BaselineKind::Critic => group
            .iter()
            .zip(&rets)
            .map(|(traj, g)| {
                traj.transitions
                    .iter()
                    .zip(g)
                    .map(|(tr, &g)| match &tr.obs {
                        Some(obs) => g - net.value(params, obs).unwrap_or(T::zero()),
                        None => T::zero(),
                    })
                    .collect()
            })
            .collect(),
    };
    (adv, rets)
}

/// One gradient step on the surrogate objective over `groups` (each group
/// is a set of rollouts that share an arrival sequence). Per-rollout
/// gradients are computed in parallel and summed in rollout order.
pub fn policy_update<T: Scalar>(
    net: &PolicyNet,
    state: &mut TrainState<T>,
    groups: &[Vec<Trajectory<T>>],
    beta: f64,
    config: &TrainConfig,
) -> UpdateStats {
    let rollouts: usize = groups.iter().map(Vec::len).sum();
    let weight = T::one() / T::of_usize(rollouts.max(1));
    let mut jobs = Vec::new();
    let mut ret_sum = 0.0;
    let mut ent_sum = 0.0;
    let mut decisions = 0usize;
    for group in groups {
        let (adv, rets) = advantages(net, &state.params, group, config.baseline);
        for ((traj, a), g) in group.iter().zip(adv).zip(rets) {
            ret_sum += g.first().map_or(0.0, |x| x.as_f64());
            for tr in &traj.transitions {
                if !tr.is_noop() {
                    ent_sum += tr.entropy;
                    decisions += 1;
                }
            }
            jobs.push((traj, a, g));
        }
    }

    let params = &state.params;
    let partial: Vec<(ParamSet<T>, f64)> = jobs
        .par_iter()
        .map(|(traj, adv, rets)| {
            let mut local = params.clone();
            local.zero_grad();
            let mut loss = 0.0;
            for ((tr, &a), &g) in traj.transitions.iter().zip(adv).zip(rets) {
                let (Some(obs), Some(order)) = (&tr.obs, &tr.action) else { continue };
                let mut tape = Tape::new();
                let term = PolicyTerm { obs, order, advantage: a, target: g };
                let l = surrogate_loss(
                    net,
                    params,
                    &mut tape,
                    &[term],
                    T::of(beta),
                    T::of(config.critic_weight),
                    weight,
                );
                loss += tape.scalar(l).as_f64();
                tape.backward(l, &mut local);
            }
            (local, loss)
        })
        .collect();

    state.params.zero_grad();
    let mut loss = 0.0;
    for (p, l) in &partial {
        state.params.accumulate_grads(p);
        loss += l;
    }
    state.adam.step(&mut state.params);
    state.params.zero_grad();
    UpdateStats {
        loss,
        mean_return: ret_sum / rollouts.max(1) as f64,
        mean_entropy: ent_sum / decisions.max(1) as f64,
    }
}

/// Per-episode training log row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub episode: u64,
    pub scale: f64,
    pub beta: f64,
    #[serde(rename = "return")]
    pub ret: f64,
    pub entropy: f64,
    pub completed_jobs: f64,
    /// Mean latency over rollouts that completed a job.
    pub latency: Option<f64>,
}

/// Runs the remaining curriculum episodes from `state.episode` on, calling
/// `on_episode` after each update.
pub fn train_curriculum<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    config: &TrainConfig,
    net: &PolicyNet,
    state: &mut TrainState<T>,
    mut on_episode: impl FnMut(&EpisodeLog, &TrainState<T>),
) -> Result<Vec<EpisodeLog>, SimError> {
    let mut logs = Vec::new();
    while let Some((_, scale)) = config.stage_of(state.episode) {
        let episode = state.episode;
        let arrival_seed = derive_seed(&[config.seed, episode]);
        let sim_config = config.sim_config::<T>(scale, arrival_seed);
        let params = &state.params;
        let group: Vec<Trajectory<T>> = (0..config.rollouts)
            .into_par_iter()
            .map(|r| {
                run_rollout(
                    job,
                    resources,
                    sim_config.clone(),
                    net,
                    params,
                    SelectMode::Sample,
                    derive_seed(&[config.seed, episode, r as u64 + 1]),
                    episode,
                    r,
                )
            })
            .collect::<Result<_, _>>()?;
        let beta = config.beta(episode);
        let stats = policy_update(net, state, std::slice::from_ref(&group), beta, config);
        let lat: Vec<f64> =
            group.iter().filter_map(|t| t.metrics.latency.mean().map(|x| x.as_f64())).collect();
        let log = EpisodeLog {
            episode,
            scale,
            beta,
            ret: stats.mean_return,
            entropy: stats.mean_entropy,
            completed_jobs: group.iter().map(|t| t.metrics.completed as f64).sum::<f64>()
                / group.len().max(1) as f64,
            latency: (!lat.is_empty()).then(|| lat.iter().sum::<f64>() / lat.len() as f64),
        };
        state.episode += 1;
        on_episode(&log, state);
        logs.push(log);
    }
    Ok(logs)
}

/// Builds the network for `config` and a fresh training state.
pub fn init_training<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    config: &TrainConfig,
) -> (PolicyNet, TrainState<T>) {
    let (net, params) = PolicyNet::new(
        config.model_with_baseline(),
        job,
        resources,
        config.capacity,
        derive_seed(&[config.seed, u64::MAX]),
    );
    let state = TrainState::new(params, config);
    (net, state)
}
