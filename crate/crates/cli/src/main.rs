//! `socsched`: simulate, sweep and train task schedulers on heterogeneous
//! SoC profiles.
//!
//! Exit codes: 0 on success, 1 for configuration errors, 2 when a run
//! violates a scheduling contract.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use socsched::harness::{
    load_model, run_grid, run_single, train, write_gantt, EvalReport, ExperimentConfig, HarnessError,
    RunArtifacts, RunSpec, SchedulerKind,
};
use socsched::heuristics::heft_static_schedule;
use socsched::verify::{verify_schedule, VerifyOptions};

#[derive(Parser)]
#[command(name = "socsched", version, about = "Heterogeneous SoC task-scheduling workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write metrics, Gantt chart and event log.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also record the full event log.
        #[arg(long)]
        events: bool,
    },
    /// HEFT on a single job instance; prints the Gantt CSV and makespan.
    ScheduleStatic {
        #[command(flatten)]
        common: Common,
        /// Write `<out>` (CSV) and its JSON twin instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate over a grid of scales and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated scales.
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare schedulers across execution-time noise levels.
    NoiseSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated noise levels (fraction of the mean).
        #[arg(long, value_delimiter = ',')]
        sigmas: Vec<f64>,
        /// Comma-separated schedulers.
        #[arg(long, value_delimiter = ',')]
        schedulers: Vec<SchedulerKind>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Train the neural policy over its curriculum.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Continue from this checkpoint directory.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Save a checkpoint every N episodes.
        #[arg(long)]
        checkpoint_every: Option<u64>,
    },
    /// Simulate and write only the Gantt CSV (plus JSON twin) to `--out`.
    ExportGantt {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "gantt.csv")]
        out: PathBuf,
    },
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Job profile path or `builtin:<canonical|wifi|toy>`.
    #[arg(long)]
    job: Option<String>,
    /// Resource profile path or `builtin:<name>`.
    #[arg(long)]
    resources: Option<String>,
    #[arg(long)]
    scheduler: Option<SchedulerKind>,
    /// Mean inter-arrival gap (`inf` disables injection).
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    sim_length: Option<f64>,
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long)]
    capacity: Option<usize>,
    /// Comma-separated seeds; the first one is used by single-run commands.
    #[arg(long, value_delimiter = ',')]
    seed: Vec<u64>,
    /// Execution-time noise as a fraction of the mean.
    #[arg(long)]
    sigma: Option<f64>,
    /// Start from a pseudo-steady state.
    #[arg(long)]
    pss: bool,
    /// Checkpoint directory for the neural scheduler.
    #[arg(long)]
    checkpoint: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.job {
            c.job = v.clone();
            // A lone builtin job implies its matching inventory.
            if self.resources.is_none() && v.starts_with("builtin:") {
                c.resources = v.clone();
            }
        }
        if let Some(v) = &self.resources {
            c.resources = v.clone();
        }
        if let Some(v) = self.scheduler {
            c.scheduler = v;
        }
        if let Some(v) = self.scale {
            c.scale = v;
        }
        if let Some(v) = self.sim_length {
            c.sim_length = v;
        }
        if let Some(v) = self.warmup {
            c.warmup = v;
        }
        if let Some(v) = self.capacity {
            c.capacity = v;
            c.train.capacity = v;
        }
        if !self.seed.is_empty() {
            c.seeds = self.seed.clone();
        }
        if let Some(v) = self.sigma {
            c.sigma = v;
        }
        if self.pss {
            c.pseudo_steady_state = true;
        }
        if let Some(v) = &self.checkpoint {
            c.checkpoint = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn single(
    cfg: &ExperimentConfig,
    events: bool,
) -> Result<socsched::engine::EpisodeResult<f64>, HarnessError> {
    let (job, res) = cfg.load_profiles()?;
    let model = if cfg.scheduler == SchedulerKind::Neural {
        Some(load_model(&job, &res, cfg, cfg.checkpoint.as_deref().map(Path::new))?)
    } else {
        None
    };
    let spec = RunSpec { record_events: events, ..RunSpec::primary(cfg) };
    let result = run_single(cfg, &job, &res, model.as_ref(), spec)?;
    let violations = verify_schedule(&job, &res, &result.record, VerifyOptions::default());
    if let Some(v) = violations.first() {
        return Err(HarnessError::Sim(socsched::engine::SimError::ContractViolation(format!(
            "schedule failed verification ({} issues), first: {v:?}",
            violations.len()
        ))));
    }
    Ok(result)
}

fn write_report(report: &EvalReport, out: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("runs.csv"), report.rows_csv())?;
    std::fs::write(out.join("summary.csv"), report.summary_csv())?;
    std::fs::write(out.join("report.json"), report.to_json())?;
    println!(
        "{:<8} {:>8} {:>6} {:>6} {:>9} {:>12} {:>9}",
        "sched", "scale", "sigma", "seed", "completed", "latency", "wall_ms"
    );
    for r in &report.rows {
        println!(
            "{:<8} {:>8} {:>6} {:>6} {:>9} {:>12} {:>9.1}",
            r.scheduler.name(),
            r.scale,
            r.sigma,
            r.seed,
            r.completed,
            r.latency.map_or("-".to_string(), |l| format!("{l:.3}")),
            r.wall.as_secs_f64() * 1e3
        );
    }
    for s in &report.summary {
        println!(
            "{} scale={} sigma={}: completed {:.2} ± {:.2}, latency {}",
            s.scheduler,
            s.scale,
            s.sigma,
            s.completed_mean,
            s.completed_std,
            match (s.latency_mean, s.latency_std) {
                (Some(m), Some(sd)) => format!("{m:.3} ± {sd:.3}"),
                _ => "-".into(),
            }
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cmd: Command) -> Result<(), HarnessError> {
    match cmd {
        Command::Simulate { common, out, events } => {
            let cfg = common.resolve()?;
            let result = single(&cfg, events)?;
            RunArtifacts::write(&out, &result, &cfg.to_json())?;
            let m = &result.metrics;
            println!(
                "completed={} injected={} latency={}",
                m.completed,
                m.injected,
                m.latency.mean().map_or("none".into(), |l| l.to_string())
            );
            println!("wrote {}", out.display());
        }
        Command::ScheduleStatic { common, out } => {
            let cfg = common.resolve()?;
            let (job, res) = cfg.load_profiles()?;
            let s = heft_static_schedule(&job, &res).map_err(socsched::engine::SimError::from)?;
            match out {
                Some(p) => {
                    write_gantt(&s.record, &p, &cfg.to_json())?;
                    println!("wrote {}", p.display());
                }
                None => print!("{}", socsched::engine::gantt_csv(&s.record)),
            }
            println!("makespan={}", s.makespan);
        }
        Command::Sweep { common, scales, out } => {
            let mut cfg = common.resolve()?;
            if !scales.is_empty() {
                cfg.scales = scales;
            }
            if cfg.scales.is_empty() {
                cfg.scales = vec![500.0, 250.0, 100.0, 50.0];
            }
            write_report(&run_grid(&cfg)?, &out)?;
        }
        Command::NoiseSweep { common, sigmas, schedulers, out } => {
            let mut cfg = common.resolve()?;
            if !sigmas.is_empty() {
                cfg.sigmas = sigmas;
            }
            if cfg.sigmas.is_empty() {
                cfg.sigmas = vec![0.0, 0.1, 0.25];
            }
            if !schedulers.is_empty() {
                cfg.schedulers = schedulers;
            }
            write_report(&run_grid(&cfg)?, &out)?;
        }
        Command::Train { common, out, resume, checkpoint_every } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = checkpoint_every {
                cfg.checkpoint_every = n;
            }
            if let Some(&s) = cfg.seeds.first().filter(|_| !common.seed.is_empty()) {
                cfg.train.seed = s;
            }
            if let Some(s) = common.sigma {
                cfg.train.sigma = s;
            }
            let outcome = train(&cfg, &out, resume.as_deref())?;
            for l in &outcome.logs {
                println!(
                    "episode {:>5} scale {:>6} return {:>12.3} entropy {:>8.4} jobs {:>7.2}",
                    l.episode, l.scale, l.ret, l.entropy, l.completed_jobs
                );
            }
            println!("checkpoint {}", outcome.checkpoint.display());
        }
        Command::ExportGantt { common, out } => {
            let cfg = common.resolve()?;
            let result = single(&cfg, false)?;
            let json = write_gantt(&result.record, &out, &cfg.to_json())?;
            println!("wrote {} and {}", out.display(), json.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
