use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::engine::{event_log_text, gantt_csv, metrics_json, EpisodeResult};
use crate::schedule::ScheduleRecord;

use super::HarnessError;

/// Gantt data grouped by PE, with the configuration that produced it.
pub fn gantt_json(record: &ScheduleRecord<f64>, config: &Value) -> String {
    #[derive(Serialize)]
    struct Bar {
        job: u64,
        task: usize,
        start: f64,
        finish: f64,
    }
    let mut by_pe: BTreeMap<usize, Vec<Bar>> = BTreeMap::new();
    for e in record.sorted() {
        by_pe.entry(e.pe).or_default().push(Bar {
            job: e.job,
            task: e.task,
            start: e.start,
            finish: e.finish,
        });
    }
    let pes: Vec<Value> = by_pe.into_iter().map(|(pe, tasks)| json!({ "pe": pe, "tasks": tasks })).collect();
    let v = json!({
        "makespan": if record.is_empty() { 0.0 } else { record.makespan() },
        "pes": pes,
        "config": config,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), HarnessError> {
    let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes `<stem>.csv` and a `<stem>.json` twin grouped by PE.
pub fn write_gantt(
    record: &ScheduleRecord<f64>,
    csv_path: &Path,
    config: &Value,
) -> Result<PathBuf, HarnessError> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(csv_path, gantt_csv(record))?;
    let json_path = csv_path.with_extension("json");
    std::fs::write(&json_path, gantt_json(record, config))?;
    Ok(json_path)
}

/// Files written for one simulated episode.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub metrics: PathBuf,
    pub gantt: PathBuf,
    pub gantt_json: PathBuf,
    pub events: Option<PathBuf>,
}

impl RunArtifacts {
    /// Writes metrics, Gantt CSV/JSON and (when recorded) the event log into
    /// `dir`.
    pub fn write(dir: &Path, result: &EpisodeResult<f64>, config: &Value) -> Result<Self, HarnessError> {
        std::fs::create_dir_all(dir)?;
        let metrics = dir.join("metrics.json");
        std::fs::write(&metrics, metrics_json(&result.metrics, Some(config)))?;
        let gantt = dir.join("gantt.csv");
        let gantt_json = write_gantt(&result.record, &gantt, config)?;
        let events = if result.events.is_empty() {
            None
        } else {
            let p = dir.join("events.log");
            std::fs::write(&p, event_log_text(&result.events))?;
            Some(p)
        };
        Ok(Self { metrics, gantt, gantt_json, events })
    }
}
