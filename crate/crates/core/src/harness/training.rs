use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::neural::{init_training, read_checkpoint_config, train_curriculum, EpisodeLog, TrainState};

use super::{ExperimentConfig, HarnessError};

pub const TRAINING_CSV_HEADER: &str = "episode,scale,beta,return,entropy,completed_jobs,latency";

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub logs: Vec<EpisodeLog>,
    pub checkpoint: PathBuf,
    pub csv: PathBuf,
    /// Episode index the run started from (non-zero after a resume).
    pub start_episode: u64,
}

fn csv_line(l: &EpisodeLog) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        l.episode,
        l.scale,
        l.beta,
        l.ret,
        l.entropy,
        l.completed_jobs,
        l.latency.map(|x| x.to_string()).unwrap_or_default()
    )
}

/// Trains the policy described by `cfg.train` and writes
/// `<out>/training.csv` plus a checkpoint in `<out>/checkpoint`.
///
/// With `resume`, weights, optimizer moments and the episode counter come
/// from that checkpoint and training continues along `cfg.train`'s
/// curriculum, which may extend the one the checkpoint was trained with.
/// The network shape must match. New rows are appended to an existing CSV.
pub fn train(
    cfg: &ExperimentConfig,
    out: &Path,
    resume: Option<&Path>,
) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    let (job, resources) = cfg.load_profiles()?;
    let train_cfg = cfg.train.clone();
    if let Some(dir) = resume {
        let (stored, _) = read_checkpoint_config(dir)?;
        if stored.model_with_baseline() != train_cfg.model_with_baseline()
            || stored.capacity != train_cfg.capacity
        {
            return Err(HarnessError::Config(format!(
                "checkpoint {} was trained with a different model or capacity",
                dir.display()
            )));
        }
    }
    let (net, mut state): (_, TrainState<f64>) = init_training(&job, &resources, &train_cfg);
    if let Some(dir) = resume {
        state.load(dir)?;
        state.adam.config = train_cfg.adam();
    }
    let start_episode = state.episode;

    std::fs::create_dir_all(out)?;
    let ckpt = out.join("checkpoint");
    let csv = out.join("training.csv");
    let append = resume.is_some() && csv.exists();
    let mut file = OpenOptions::new().create(true).write(true).append(append).truncate(!append).open(&csv)?;
    if !append {
        file.write_all(format!("{TRAINING_CSV_HEADER}\n").as_bytes())?;
    }
    std::fs::write(
        out.join("experiment.json"),
        serde_json::to_string_pretty(&cfg.to_json()).expect("json") + "\n",
    )?;

    let every = cfg.checkpoint_every;
    let mut io_err: Option<std::io::Error> = None;
    let logs = train_curriculum(&job, &resources, &train_cfg, &net, &mut state, |log, st| {
        if io_err.is_some() {
            return;
        }
        let mut r = file.write_all(csv_line(log).as_bytes());
        if r.is_ok() && every > 0 && (log.episode + 1) % every == 0 {
            r = st.save(&ckpt, &train_cfg);
        }
        if let Err(e) = r {
            io_err = Some(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    file.flush()?;
    state.save(&ckpt, &train_cfg)?;
    Ok(TrainOutcome { logs, checkpoint: ckpt, csv, start_episode })
}
