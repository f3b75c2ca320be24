use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_episode, EpisodeResult, TaskOrderer};
use crate::neural::{init_training, read_checkpoint_config, NeuralOrderer, PolicyNet, SelectMode};
use crate::nn::ParamSet;
use crate::profile::{JobProfile, ResourceProfile};
use crate::schedulers::{FifoOrderer, HeftOrderer, RandomOrderer};

use super::{ExperimentConfig, HarnessError, SchedulerKind};

/// A policy network with its weights.
pub struct Model {
    pub net: PolicyNet,
    pub params: ParamSet<f64>,
}

/// Restores a trained policy from `dir`, or builds an untrained one from the
/// experiment's `train` section when `dir` is `None`.
pub fn load_model(
    job: &JobProfile<f64>,
    resources: &ResourceProfile,
    cfg: &ExperimentConfig,
    dir: Option<&Path>,
) -> Result<Model, HarnessError> {
    let train_cfg = match dir {
        Some(d) => read_checkpoint_config(d)?.0,
        None => cfg.train.clone(),
    };
    if train_cfg.capacity != cfg.capacity {
        return Err(HarnessError::Config(format!(
            "policy was built for capacity {} but the experiment uses {}",
            train_cfg.capacity, cfg.capacity
        )));
    }
    let (net, mut state) = init_training(job, resources, &train_cfg);
    if let Some(d) = dir {
        state.load(d)?;
    }
    Ok(Model { net, params: state.params })
}

pub fn make_orderer<'a>(
    kind: SchedulerKind,
    job: &JobProfile<f64>,
    resources: &ResourceProfile,
    model: Option<&'a Model>,
    seed: u64,
) -> Result<Box<dyn TaskOrderer<f64> + 'a>, HarnessError> {
    Ok(match kind {
        SchedulerKind::Heft => Box::new(HeftOrderer::new(job, resources)),
        SchedulerKind::Fifo => Box::new(FifoOrderer),
        SchedulerKind::Random => Box::new(RandomOrderer::new(seed)),
        SchedulerKind::Neural => {
            let m = model.ok_or_else(|| HarnessError::Config("neural scheduler needs a model".into()))?;
            Box::new(NeuralOrderer::new(&m.net, &m.params, SelectMode::Greedy, seed))
        }
    })
}

/// The per-run knobs of a grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub scheduler: SchedulerKind,
    pub scale: f64,
    pub sigma: f64,
    pub seed: u64,
    pub record_events: bool,
}

impl RunSpec {
    /// The config's primary scheduler, scale, sigma and first seed.
    pub fn primary(cfg: &ExperimentConfig) -> Self {
        Self {
            scheduler: cfg.scheduler,
            scale: cfg.scale,
            sigma: cfg.sigma,
            seed: cfg.seeds.first().copied().unwrap_or(0),
            record_events: false,
        }
    }
}

/// One simulated episode.
pub fn run_single(
    cfg: &ExperimentConfig,
    job: &JobProfile<f64>,
    resources: &ResourceProfile,
    model: Option<&Model>,
    spec: RunSpec,
) -> Result<EpisodeResult<f64>, HarnessError> {
    let mut sim_cfg = cfg.sim_config(spec.scale, spec.sigma, spec.seed);
    sim_cfg.record_events = spec.record_events;
    let mut orderer = make_orderer(spec.scheduler, job, resources, model, spec.seed)?;
    Ok(run_episode(job, resources, sim_cfg, orderer.as_mut())?)
}

/// One cell of a run grid. Wall time is informational and ignored by `==`.
#[derive(Debug, Clone, Serialize)]
pub struct EvalRow {
    pub scheduler: SchedulerKind,
    pub scale: f64,
    pub sigma: f64,
    pub seed: u64,
    pub completed: usize,
    pub injected: u64,
    pub latency: Option<f64>,
    #[serde(skip)]
    pub wall: Duration,
}

impl PartialEq for EvalRow {
    fn eq(&self, o: &Self) -> bool {
        self.scheduler == o.scheduler
            && self.scale.to_bits() == o.scale.to_bits()
            && self.sigma.to_bits() == o.sigma.to_bits()
            && self.seed == o.seed
            && self.completed == o.completed
            && self.injected == o.injected
            && self.latency.map(f64::to_bits) == o.latency.map(f64::to_bits)
    }
}

/// Mean and sample standard deviation over the seeds of one
/// (scheduler, scale, sigma) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scheduler: SchedulerKind,
    pub scale: f64,
    pub sigma: f64,
    pub runs: usize,
    pub completed_mean: f64,
    pub completed_std: f64,
    /// Over runs that completed at least one job.
    pub latency_mean: Option<f64>,
    pub latency_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub rows: Vec<EvalRow>,
    pub summary: Vec<Summary>,
}

fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Some((mean, var.sqrt()))
}

/// Groups consecutive rows sharing (scheduler, scale, sigma).
pub fn summarize(rows: &[EvalRow]) -> Vec<Summary> {
    let same = |a: &EvalRow, b: &EvalRow| {
        a.scheduler == b.scheduler
            && a.scale.to_bits() == b.scale.to_bits()
            && a.sigma.to_bits() == b.sigma.to_bits()
    };
    rows.chunk_by(|a, b| same(a, b))
        .map(|g| {
            let completed: Vec<f64> = g.iter().map(|r| r.completed as f64).collect();
            let lat: Vec<f64> = g.iter().filter_map(|r| r.latency).collect();
            let (cm, cs) = mean_std(&completed).unwrap_or((0.0, 0.0));
            let l = mean_std(&lat);
            Summary {
                scheduler: g[0].scheduler,
                scale: g[0].scale,
                sigma: g[0].sigma,
                runs: g.len(),
                completed_mean: cm,
                completed_std: cs,
                latency_mean: l.map(|p| p.0),
                latency_std: l.map(|p| p.1),
            }
        })
        .collect()
}

/// Runs every (scheduler, sigma, scale, seed) combination in parallel.
/// Rows come back in that nested order, so results do not depend on thread
/// scheduling. Seeds are paired: the same seed gives every scheduler the
/// same arrivals and the same noise stream.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<EvalReport, HarnessError> {
    cfg.validate()?;
    let (job, resources) = cfg.load_profiles()?;
    let kinds = cfg.scheduler_list();
    let model = if kinds.contains(&SchedulerKind::Neural) {
        Some(load_model(&job, &resources, cfg, cfg.checkpoint.as_deref().map(Path::new))?)
    } else {
        None
    };
    let mut cells = Vec::new();
    for &k in &kinds {
        for &sigma in &cfg.sigma_list() {
            for &scale in &cfg.scale_list() {
                for &seed in &cfg.seeds {
                    cells.push((k, sigma, scale, seed));
                }
            }
        }
    }
    let rows = cells
        .par_iter()
        .map(|&(k, sigma, scale, seed)| {
            let t0 = Instant::now();
            let spec = RunSpec { scheduler: k, scale, sigma, seed, record_events: false };
            let res = run_single(cfg, &job, &resources, model.as_ref(), spec)?;
            Ok(EvalRow {
                scheduler: k,
                scale,
                sigma,
                seed,
                completed: res.metrics.completed,
                injected: res.metrics.injected,
                latency: res.metrics.latency.mean(),
                wall: t0.elapsed(),
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let summary = summarize(&rows);
    Ok(EvalReport { config: cfg.clone(), rows, summary })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EvalReport {
    pub const ROWS_HEADER: &'static str = "scheduler,scale,sigma,seed,completed,injected,latency";
    pub const SUMMARY_HEADER: &'static str =
        "scheduler,scale,sigma,runs,completed_mean,completed_std,latency_mean,latency_std";

    /// One line per run. An empty latency means nothing completed.
    pub fn rows_csv(&self) -> String {
        let mut s = format!("{}\n", Self::ROWS_HEADER);
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{},{},{}\n",
                r.scheduler,
                r.scale,
                r.sigma,
                r.seed,
                r.completed,
                r.injected,
                opt(r.latency)
            );
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = format!("{}\n", Self::SUMMARY_HEADER);
        for r in &self.summary {
            s += &format!(
                "{},{},{},{},{},{},{},{}\n",
                r.scheduler,
                r.scale,
                r.sigma,
                r.runs,
                r.completed_mean,
                r.completed_std,
                opt(r.latency_mean),
                opt(r.latency_std)
            );
        }
        s
    }

    /// The report with its resolved config, minus wall times.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
