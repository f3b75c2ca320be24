use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{NoiseModel, SimConfig};
use crate::neural::TrainConfig;
use crate::profile::{parse_profiles, Bundled, JobProfile, ResourceProfile};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Heft,
    Neural,
    Random,
    Fifo,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] =
        [SchedulerKind::Heft, SchedulerKind::Neural, SchedulerKind::Random, SchedulerKind::Fifo];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Heft => "heft",
            SchedulerKind::Neural => "neural",
            SchedulerKind::Random => "random",
            SchedulerKind::Fifo => "fifo",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scheduler {s:?} (expected heft, neural, random or fifo)"))
    }
}

/// One experiment: profiles, scheduler(s), simulation window, seeds and,
/// for training, the curriculum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Job profile path, or `builtin:<name>`.
    pub job: String,
    /// Resource profile path, or `builtin:<name>`.
    pub resources: String,
    pub scheduler: SchedulerKind,
    /// Schedulers compared by the noise sweep; empty means `[scheduler]`.
    pub schedulers: Vec<SchedulerKind>,
    pub sim_length: f64,
    pub warmup: f64,
    /// Mean inter-arrival gap; `inf` disables injection.
    pub scale: f64,
    /// Scales visited by `sweep`; empty means `[scale]`.
    pub scales: Vec<f64>,
    pub capacity: usize,
    pub seeds: Vec<u64>,
    pub sigma: f64,
    /// Noise levels visited by `noise-sweep`; empty means `[sigma]`.
    pub sigmas: Vec<f64>,
    pub pseudo_steady_state: bool,
    /// Checkpoint directory for the neural scheduler.
    pub checkpoint: Option<String>,
    /// Episodes between training checkpoints (0: only at the end).
    pub checkpoint_every: u64,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            job: "builtin:canonical".into(),
            resources: "builtin:canonical".into(),
            scheduler: SchedulerKind::Heft,
            schedulers: Vec::new(),
            sim_length: 100_000.0,
            warmup: 20_000.0,
            scale: 50.0,
            scales: Vec::new(),
            capacity: 12,
            seeds: (0..5).collect(),
            sigma: 0.0,
            sigmas: Vec::new(),
            pseudo_steady_state: false,
            checkpoint: None,
            checkpoint_every: 0,
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    // Negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.sim_length >= 0.0 && self.sim_length.is_finite()) {
            return bad(format!("sim_length must be finite and >= 0, got {}", self.sim_length));
        }
        if !(self.warmup >= 0.0) || (self.warmup >= self.sim_length && self.sim_length > 0.0) {
            return bad(format!(
                "warmup ({}) must be >= 0 and below sim_length ({})",
                self.warmup, self.sim_length
            ));
        }
        if self.capacity == 0 {
            return bad("capacity must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        for &s in self.scale_list().iter() {
            if !(s > 0.0) {
                return bad(format!("scale must be > 0, got {s}"));
            }
        }
        for &s in self.sigma_list().iter() {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("sigma must be finite and >= 0, got {s}"));
            }
        }
        if self.train.rollouts == 0 {
            return bad("train.rollouts must be at least 1".into());
        }
        Ok(())
    }

    pub fn scale_list(&self) -> Vec<f64> {
        if self.scales.is_empty() {
            vec![self.scale]
        } else {
            self.scales.clone()
        }
    }

    pub fn sigma_list(&self) -> Vec<f64> {
        if self.sigmas.is_empty() {
            vec![self.sigma]
        } else {
            self.sigmas.clone()
        }
    }

    pub fn scheduler_list(&self) -> Vec<SchedulerKind> {
        if self.schedulers.is_empty() {
            vec![self.scheduler]
        } else {
            self.schedulers.clone()
        }
    }

    /// Simulator settings for one run.
    pub fn sim_config(&self, scale: f64, sigma: f64, seed: u64) -> SimConfig<f64> {
        SimConfig {
            sim_length: self.sim_length,
            warmup: self.warmup,
            scale: scale.is_finite().then_some(scale),
            capacity: self.capacity,
            noise: NoiseModel::with_sigma(sigma),
            pseudo_steady_state: self.pseudo_steady_state,
            seed,
            max_jobs: None,
            record_events: false,
        }
    }

    /// The resolved configuration as JSON, embedded in every artifact.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn load_profiles(&self) -> Result<(JobProfile<f64>, ResourceProfile), HarnessError> {
        load_profiles(&self.job, &self.resources)
    }
}

fn read_source(spec: &str, job: bool) -> Result<String, HarnessError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => {
            let b: Bundled = name.parse().map_err(HarnessError::Config)?;
            Ok(if job { b.job_text() } else { b.resource_text() }.to_string())
        }
        None => std::fs::read_to_string(spec).map_err(|e| HarnessError::Config(format!("{spec}: {e}"))),
    }
}

/// Reads and validates a (job, resources) pair; each side is a path or
/// `builtin:<name>`.
pub fn load_profiles(job: &str, resources: &str) -> Result<(JobProfile<f64>, ResourceProfile), HarnessError> {
    let jt = read_source(job, true)?;
    let rt = read_source(resources, false)?;
    Ok(parse_profiles(&jt, &rt)?)
}
