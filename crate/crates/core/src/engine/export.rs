use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::{LogEntry, Metrics};
use crate::scalar::Scalar;
use crate::schedule::ScheduleRecord;

/// Gantt CSV: header `job,task,pe,start,finish`, rows sorted by start time,
/// times in 6-decimal fixed point.
pub fn gantt_csv<T: Scalar>(record: &ScheduleRecord<T>) -> String {
    let mut out = String::from("job,task,pe,start,finish\n");
    for e in record.sorted() {
        writeln!(out, "{},{},{},{:.6},{:.6}", e.job, e.task, e.pe, e.start.as_f64(), e.finish.as_f64())
            .unwrap();
    }
    out
}

pub fn write_gantt_csv<T: Scalar>(record: &ScheduleRecord<T>, path: &Path) -> io::Result<()> {
    std::fs::write(path, gantt_csv(record))
}

/// One line per event: `<clock> <kind> <job> <task> <pe>`, with `-` for
/// fields that do not apply.
pub fn event_log_text<T: Scalar>(log: &[LogEntry<T>]) -> String {
    fn opt<V: ToString>(v: Option<V>) -> String {
        v.map_or_else(|| "-".to_string(), |v| v.to_string())
    }
    let mut out = String::new();
    for e in log {
        writeln!(
            out,
            "{:.6} {} {} {} {}",
            e.clock.as_f64(),
            e.kind.as_str(),
            opt(e.job),
            opt(e.task),
            opt(e.pe)
        )
        .unwrap();
    }
    out
}

/// Metrics as pretty JSON. `config`, when given, is embedded under the
/// `config` key so the file describes the run that produced it.
pub fn metrics_json<T: Scalar + Serialize>(metrics: &Metrics<T>, config: Option<&Value>) -> String {
    let mut v = serde_json::to_value(metrics).expect("metrics serialize");
    if let (Some(c), Value::Object(map)) = (config, &mut v) {
        map.insert("config".into(), c.clone());
    }
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}
