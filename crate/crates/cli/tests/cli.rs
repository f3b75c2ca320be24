use std::path::Path;
use std::process::{Command, Output};

fn socsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socsched")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn schedule_static_prints_gantt_and_makespan() {
    let o = socsched(&["schedule-static", "--job", "builtin:canonical"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("job,task,pe,start,finish\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("0,")).count(), 10);
    assert!(out.trim_end().ends_with("makespan=80"));
}

#[test]
fn simulate_writes_self_describing_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = socsched(&[
            "simulate",
            "--sim-length",
            "3000",
            "--warmup",
            "500",
            "--seed",
            "9",
            "--sigma",
            "0.1",
            "--events",
            "--out",
            p(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["metrics.json", "gantt.csv", "gantt.json", "events.log"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let metrics = std::fs::read_to_string(a.join("metrics.json")).unwrap();
    for key in ["\"completed\"", "\"latency\"", "\"injected\"", "\"seed\": 9", "\"config\"", "\"sigma\": 0.1"]
    {
        assert!(metrics.contains(key), "{key} missing from {metrics}");
    }
}

#[test]
fn noise_sweep_has_one_row_per_scheduler_sigma_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = socsched(&[
        "noise-sweep",
        "--sim-length",
        "2000",
        "--warmup",
        "200",
        "--seed",
        "1,2,3",
        "--sigmas",
        "0,0.25",
        "--schedulers",
        "heft,fifo",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 3);
    assert!(csv.starts_with("scheduler,scale,sigma,seed,"));
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"config\""));
}

#[test]
fn sweep_reports_each_scale() {
    let dir = tempfile::tempdir().unwrap();
    let o = socsched(&[
        "sweep",
        "--sim-length",
        "2000",
        "--warmup",
        "200",
        "--scales",
        "500,50",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn export_gantt_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let o = socsched(&["export-gantt", "--sim-length", "1000", "--warmup", "0", "--out", p(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("job,task,pe,start,finish\n"));
    assert!(std::fs::read_to_string(dir.path().join("g.json")).unwrap().contains("\"pes\""));
}

#[test]
fn train_and_evaluate_neural() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("train.toml");
    std::fs::write(
        &cfg,
        "job = \"builtin:toy\"\nresources = \"builtin:toy\"\nscheduler = \"neural\"\n\
         [train]\nsim_length = 100.0\nrollouts = 2\nstages = [{ scale = 500.0, episodes = 2 }]\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = socsched(&["train", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("training.csv")).unwrap();
    assert!(csv.starts_with("episode,scale,beta,return,entropy,completed_jobs,latency\n"));
    assert_eq!(csv.lines().count(), 3);

    let ckpt = out.join("checkpoint");
    let o = socsched(&[
        "simulate",
        "--config",
        p(&cfg),
        "--checkpoint",
        p(&ckpt),
        "--sim-length",
        "1000",
        "--warmup",
        "0",
        "--scale",
        "100",
        "--out",
        p(&dir.path().join("eval")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_errors_exit_with_one() {
    for args in [
        vec!["simulate", "--sim-length", "10", "--warmup", "10"],
        vec!["simulate", "--capacity", "0"],
        vec!["simulate", "--scheduler", "edf"],
        vec!["simulate", "--job", "/nonexistent/job.txt"],
        vec!["frobnicate"],
    ] {
        let o = socsched(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "sim_lenght = 5.0\n").unwrap();
    assert_eq!(socsched(&["simulate", "--config", p(&cfg)]).status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(socsched(&["--help"]).status.code(), Some(0));
}
