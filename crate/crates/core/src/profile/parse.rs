//! Line-oriented text format for job and resource profiles.
//!
//! ```text
//! # job file
//! job <name>
//! task <id> exec <type>:<time> [<type>:<time> ...]
//! edge <src> <dst> <comm_cost>
//!
//! # resource file
//! pe <id> type <type-id>
//! ```
//!
//! Tokens are whitespace-separated and `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{
    check_compatible, JobProfile, Pe, ProfileError, ResourceProfile, ResourceType, TaskId, TaskSpec,
};
use crate::scalar::Scalar;

fn perr(line: usize, field: &str, message: impl Into<String>) -> ProfileError {
    ProfileError::Parse { line, field: field.to_string(), message: message.into() }
}

fn number<N: FromStr>(line: usize, field: &str, tok: Option<&str>) -> Result<N, ProfileError> {
    let tok = tok.ok_or_else(|| perr(line, field, "missing value"))?;
    tok.parse().map_err(|_| perr(line, field, format!("cannot parse `{tok}`")))
}

fn keyword(line: usize, expected: &str, tok: Option<&str>) -> Result<(), ProfileError> {
    match tok {
        Some(t) if t == expected => Ok(()),
        Some(t) => Err(perr(line, expected, format!("expected `{expected}`, found `{t}`"))),
        None => Err(perr(line, expected, format!("expected `{expected}`"))),
    }
}

/// Yields `(1-based line number, tokens)` for non-empty lines.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let content = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub fn parse_job<T: Scalar>(text: &str) -> Result<JobProfile<T>, ProfileError> {
    let mut name: Option<String> = None;
    let mut tasks: BTreeMap<TaskId, TaskSpec<T>> = BTreeMap::new();
    let mut edges: Vec<(usize, TaskId, TaskId, T)> = Vec::new();

    for (ln, toks) in lines(text) {
        let mut it = toks.iter().copied();
        match it.next().unwrap() {
            "job" => {
                if name.is_some() {
                    return Err(perr(ln, "job", "duplicate `job` header"));
                }
                let n = it.next().ok_or_else(|| perr(ln, "name", "missing job name"))?;
                if let Some(extra) = it.next() {
                    return Err(perr(ln, "name", format!("unexpected token `{extra}`")));
                }
                name = Some(n.to_string());
            }
            "task" => {
                let id: TaskId = number(ln, "id", it.next())?;
                keyword(ln, "exec", it.next())?;
                let mut spec = TaskSpec::new(id);
                for pair in it {
                    let (ty, time) = pair
                        .split_once(':')
                        .ok_or_else(|| perr(ln, "exec", format!("expected <type>:<time>, found `{pair}`")))?;
                    let ty: ResourceType = number(ln, "exec.type", Some(ty))?;
                    let time: T = number(ln, "exec.time", Some(time))?;
                    if spec.exec_times.insert(ty, time).is_some() {
                        return Err(perr(ln, "exec.type", format!("type {ty} listed twice")));
                    }
                }
                if tasks.insert(id, spec).is_some() {
                    return Err(ProfileError::DuplicateTask(id));
                }
            }
            "edge" => {
                let src: TaskId = number(ln, "src", it.next())?;
                let dst: TaskId = number(ln, "dst", it.next())?;
                let comm: T = number(ln, "comm_cost", it.next())?;
                if let Some(extra) = it.next() {
                    return Err(perr(ln, "edge", format!("unexpected token `{extra}`")));
                }
                edges.push((ln, src, dst, comm));
            }
            other => return Err(perr(ln, "directive", format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or_else(|| perr(1, "job", "missing `job <name>` header"))?;
    for (ln, src, dst, comm) in edges {
        let task = tasks
            .get_mut(&dst)
            .ok_or_else(|| perr(ln, "dst", format!("edge targets undeclared task {dst}")))?;
        task.predecessors.push((src, comm));
    }
    JobProfile::new(name, tasks.into_values().collect())
}

pub fn parse_resources(text: &str) -> Result<ResourceProfile, ProfileError> {
    let mut pes = Vec::new();
    for (ln, toks) in lines(text) {
        let mut it = toks.iter().copied();
        match it.next().unwrap() {
            "pe" => {
                let id = number(ln, "id", it.next())?;
                keyword(ln, "type", it.next())?;
                let rtype = number(ln, "type-id", it.next())?;
                if let Some(extra) = it.next() {
                    return Err(perr(ln, "pe", format!("unexpected token `{extra}`")));
                }
                pes.push(Pe { id, rtype });
            }
            other => return Err(perr(ln, "directive", format!("unknown directive `{other}`"))),
        }
    }
    ResourceProfile::new(pes)
}

/// Parses and cross-validates a job file and a resource file.
pub fn parse_profiles<T: Scalar>(
    job_text: &str,
    resource_text: &str,
) -> Result<(JobProfile<T>, ResourceProfile), ProfileError> {
    let job = parse_job(job_text)?;
    let res = parse_resources(resource_text)?;
    check_compatible(&job, &res)?;
    Ok((job, res))
}

impl<T: Scalar> JobProfile<T> {
    /// Normalized text form: tasks by id, exec entries by type, edges by
    /// `(src, dst)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "job {}", self.name()).unwrap();
        for t in self.tasks() {
            write!(out, "task {} exec", t.id).unwrap();
            for (ty, w) in &t.exec_times {
                write!(out, " {ty}:{w}").unwrap();
            }
            out.push('\n');
        }
        for (s, d, c) in self.edges() {
            writeln!(out, "edge {s} {d} {c}").unwrap();
        }
        out
    }
}

impl ResourceProfile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for pe in self.pes() {
            writeln!(out, "pe {} type {}", pe.id, pe.rtype).unwrap();
        }
        out
    }
}
