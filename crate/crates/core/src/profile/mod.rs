//! Static workload description: job DAGs with per-resource-type execution
//! times, edge communication costs, and the PE inventory.
//!
//! Unsupported functionality is an absent `exec_times` entry. Nothing in this
//! module ever stores a sentinel execution time.

mod bundled;
mod parse;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::scalar::Scalar;

pub use bundled::{Bundled, BundledProfile};
pub use parse::{parse_job, parse_profiles, parse_resources};

pub type TaskId = usize;
pub type PeId = usize;
pub type ResourceType = u32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("line {line}, field `{field}`: {message}")]
    Parse { line: usize, field: String, message: String },
    #[error("job has no tasks (no entry task)")]
    Empty,
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("task ids must be contiguous from 0; id {0} is missing")]
    MissingTaskId(TaskId),
    #[error("task {task} references unknown predecessor {pred}")]
    UnknownPredecessor { task: TaskId, pred: TaskId },
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: TaskId, dst: TaskId },
    #[error("cycle detected: {}", format_cycle(.0))]
    Cycle(Vec<TaskId>),
    #[error("task {0} is supported by no resource type")]
    UnsupportedTask(TaskId),
    #[error("task {task}: execution time {value} on type {rtype} must be finite and > 0")]
    InvalidExecTime { task: TaskId, rtype: ResourceType, value: f64 },
    #[error("edge {src} -> {dst}: communication cost {value} must be finite and >= 0")]
    InvalidCommCost { src: TaskId, dst: TaskId, value: f64 },
    #[error("resource profile has no PEs")]
    NoPes,
    #[error("duplicate PE id {0}")]
    DuplicatePe(PeId),
    #[error("PE ids must be contiguous from 0; id {0} is missing")]
    MissingPeId(PeId),
    #[error("task {0} is not supported by any PE in the resource profile")]
    NoSupportingPe(TaskId),
    #[error("resource type {rtype} (used by task {task}) has no PE")]
    OrphanType { rtype: ResourceType, task: TaskId },
}

fn format_cycle(ids: &[TaskId]) -> String {
    ids.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" -> ")
}

/// One node of a job DAG.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec<T> {
    pub id: TaskId,
    /// `(predecessor id, communication cost)`, sorted by predecessor id.
    pub predecessors: Vec<(TaskId, T)>,
    pub exec_times: BTreeMap<ResourceType, T>,
}

impl<T: Scalar> TaskSpec<T> {
    pub fn new(id: TaskId) -> Self {
        Self { id, predecessors: Vec::new(), exec_times: BTreeMap::new() }
    }

    pub fn with_exec(mut self, rtype: ResourceType, time: T) -> Self {
        self.exec_times.insert(rtype, time);
        self
    }

    pub fn with_pred(mut self, pred: TaskId, comm: T) -> Self {
        self.predecessors.push((pred, comm));
        self
    }

    pub fn exec_time(&self, rtype: ResourceType) -> Option<T> {
        self.exec_times.get(&rtype).copied()
    }

    pub fn supports(&self, rtype: ResourceType) -> bool {
        self.exec_times.contains_key(&rtype)
    }
}

/// A validated, acyclic job DAG. Task `i` lives at index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct JobProfile<T> {
    name: String,
    tasks: Vec<TaskSpec<T>>,
    successors: Vec<Vec<(TaskId, T)>>,
    entry: Vec<TaskId>,
    exit: Vec<TaskId>,
    topo: Vec<TaskId>,
}

impl<T: Scalar> JobProfile<T> {
    /// Builds and validates a job. Tasks may be given in any order but their
    /// ids must cover `0..n` exactly once.
    pub fn new(name: impl Into<String>, mut tasks: Vec<TaskSpec<T>>) -> Result<Self, ProfileError> {
        tasks.sort_by_key(|t| t.id);
        for t in tasks.iter_mut() {
            t.predecessors.sort_by_key(|&(p, _)| p);
        }
        validate_dag(&tasks)?;

        let n = tasks.len();
        let mut successors = vec![Vec::new(); n];
        for t in &tasks {
            for &(p, c) in &t.predecessors {
                successors[p].push((t.id, c));
            }
        }
        let entry = tasks.iter().filter(|t| t.predecessors.is_empty()).map(|t| t.id).collect();
        let exit = (0..n).filter(|&i| successors[i].is_empty()).collect();
        let topo = topological_order(&tasks).expect("validated acyclic");

        Ok(Self { name: name.into(), tasks, successors, entry, exit, topo })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[TaskSpec<T>] {
        &self.tasks
    }

    pub fn task(&self, id: TaskId) -> &TaskSpec<T> {
        &self.tasks[id]
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn successors(&self, id: TaskId) -> &[(TaskId, T)] {
        &self.successors[id]
    }

    pub fn predecessors(&self, id: TaskId) -> &[(TaskId, T)] {
        &self.tasks[id].predecessors
    }

    pub fn entry_tasks(&self) -> &[TaskId] {
        &self.entry
    }

    pub fn exit_tasks(&self) -> &[TaskId] {
        &self.exit
    }

    /// Topological order, smallest ready id first.
    pub fn topological_order(&self) -> &[TaskId] {
        &self.topo
    }

    /// All edges as `(src, dst, comm)`, sorted by `(src, dst)`.
    pub fn edges(&self) -> Vec<(TaskId, TaskId, T)> {
        let mut edges: Vec<_> = self
            .successors
            .iter()
            .enumerate()
            .flat_map(|(s, succ)| succ.iter().map(move |&(d, c)| (s, d, c)))
            .collect();
        edges.sort_by_key(|&(s, d, _)| (s, d));
        edges
    }

    /// Communication cost of edge `src -> dst`, if the edge exists.
    pub fn comm_cost(&self, src: TaskId, dst: TaskId) -> Option<T> {
        self.tasks[dst].predecessors.iter().find(|&&(p, _)| p == src).map(|&(_, c)| c)
    }

    /// Set of resource types referenced by any task.
    pub fn referenced_types(&self) -> BTreeSet<ResourceType> {
        self.tasks.iter().flat_map(|t| t.exec_times.keys().copied()).collect()
    }

    /// Number of tasks reachable from `id` (excluding `id`).
    pub fn descendant_count(&self, id: TaskId) -> usize {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![id];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.successors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count
    }
}

/// A processing element: one instance of a resource type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pe {
    pub id: PeId,
    pub rtype: ResourceType,
}

/// The PE inventory. PE `j` lives at index `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceProfile {
    pes: Vec<Pe>,
}

impl ResourceProfile {
    pub fn new(mut pes: Vec<Pe>) -> Result<Self, ProfileError> {
        if pes.is_empty() {
            return Err(ProfileError::NoPes);
        }
        pes.sort_by_key(|p| p.id);
        for (i, pe) in pes.iter().enumerate() {
            if pe.id < i {
                return Err(ProfileError::DuplicatePe(pe.id));
            }
            if pe.id > i {
                return Err(ProfileError::MissingPeId(i));
            }
        }
        Ok(Self { pes })
    }

    /// One PE per listed type, ids assigned in order.
    pub fn from_types(types: &[ResourceType]) -> Result<Self, ProfileError> {
        Self::new(types.iter().enumerate().map(|(id, &rtype)| Pe { id, rtype }).collect())
    }

    pub fn pes(&self) -> &[Pe] {
        &self.pes
    }

    pub fn len(&self) -> usize {
        self.pes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pes.is_empty()
    }

    pub fn rtype(&self, pe: PeId) -> ResourceType {
        self.pes[pe].rtype
    }

    pub fn type_count(&self) -> usize {
        self.pes.iter().map(|p| p.rtype).collect::<BTreeSet<_>>().len()
    }

    /// Execution time of `task` on `pe`, `None` when unsupported.
    pub fn exec_time<T: Scalar>(&self, task: &TaskSpec<T>, pe: PeId) -> Option<T> {
        task.exec_time(self.pes[pe].rtype)
    }

    /// PEs able to run `task`, ascending id.
    pub fn supporting_pes<'a, T: Scalar>(
        &'a self,
        task: &'a TaskSpec<T>,
    ) -> impl Iterator<Item = (PeId, T)> + 'a {
        self.pes.iter().filter_map(move |p| task.exec_time(p.rtype).map(|w| (p.id, w)))
    }
}

/// Checks the DAG invariants of a task list indexed by id.
pub fn validate_dag<T: Scalar>(tasks: &[TaskSpec<T>]) -> Result<(), ProfileError> {
    if tasks.is_empty() {
        return Err(ProfileError::Empty);
    }
    for (i, t) in tasks.iter().enumerate() {
        if t.id < i {
            return Err(ProfileError::DuplicateTask(t.id));
        }
        if t.id > i {
            return Err(ProfileError::MissingTaskId(i));
        }
    }
    let n = tasks.len();
    for t in tasks {
        let mut seen = BTreeSet::new();
        for &(p, c) in &t.predecessors {
            if p >= n {
                return Err(ProfileError::UnknownPredecessor { task: t.id, pred: p });
            }
            if !seen.insert(p) {
                return Err(ProfileError::DuplicateEdge { src: p, dst: t.id });
            }
            if !c.is_finite() || c < T::zero() {
                return Err(ProfileError::InvalidCommCost { src: p, dst: t.id, value: c.as_f64() });
            }
        }
        for (&rtype, &w) in &t.exec_times {
            if !w.is_finite() || w <= T::zero() {
                return Err(ProfileError::InvalidExecTime { task: t.id, rtype, value: w.as_f64() });
            }
        }
    }
    if let Some(cycle) = find_cycle(tasks) {
        return Err(ProfileError::Cycle(cycle));
    }
    if let Some(t) = tasks.iter().find(|t| t.exec_times.is_empty()) {
        return Err(ProfileError::UnsupportedTask(t.id));
    }
    Ok(())
}

/// Checks that a job can run on a resource profile: every task has a
/// supporting PE and every referenced resource type has at least one PE.
pub fn check_compatible<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
) -> Result<(), ProfileError> {
    let present: BTreeSet<ResourceType> = resources.pes().iter().map(|p| p.rtype).collect();
    for t in job.tasks() {
        if !t.exec_times.keys().any(|r| present.contains(r)) {
            return Err(ProfileError::NoSupportingPe(t.id));
        }
    }
    for t in job.tasks() {
        if let Some(&rtype) = t.exec_times.keys().find(|r| !present.contains(r)) {
            return Err(ProfileError::OrphanType { rtype, task: t.id });
        }
    }
    Ok(())
}

/// Mean execution time of `task` over all PEs that support it, counting PEs
/// (not types). `None` when no PE supports the task.
///
/// Computed as a count-weighted mean over types so that a single supporting
/// type yields its execution time exactly.
pub fn mean_exec_time<T: Scalar>(task: &TaskSpec<T>, resources: &ResourceProfile) -> Option<T> {
    let mut counts: BTreeMap<ResourceType, usize> = BTreeMap::new();
    for pe in resources.pes() {
        if task.supports(pe.rtype) {
            *counts.entry(pe.rtype).or_default() += 1;
        }
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return None;
    }
    if counts.len() == 1 {
        // exact for a uniform multiset, no rounding through k·w / k
        return counts.keys().next().map(|r| task.exec_times[r]);
    }
    let sum: T = counts.iter().map(|(&r, &k)| T::of_usize(k) * task.exec_times[&r]).sum();
    Some(sum / T::of_usize(total))
}

fn topological_order<T: Scalar>(tasks: &[TaskSpec<T>]) -> Option<Vec<TaskId>> {
    let n = tasks.len();
    let mut indeg: Vec<usize> = tasks.iter().map(|t| t.predecessors.len()).collect();
    let mut succ = vec![Vec::new(); n];
    for t in tasks {
        for &(p, _) in &t.predecessors {
            succ[p].push(t.id);
        }
    }
    let mut heap: BinaryHeap<Reverse<TaskId>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(Reverse(w));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// First cycle found by DFS over successor edges, as a closed id sequence
/// (first id repeated at the end).
fn find_cycle<T: Scalar>(tasks: &[TaskSpec<T>]) -> Option<Vec<TaskId>> {
    let n = tasks.len();
    let mut succ = vec![Vec::new(); n];
    for t in tasks {
        for &(p, _) in &t.predecessors {
            succ[p].push(t.id);
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; n];
    let mut path: Vec<TaskId> = Vec::new();
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(TaskId, usize)> = vec![(root, 0)];
        color[root] = 1;
        path.push(root);
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        path.push(w);
                        stack.push((w, 0));
                    }
                    1 => {
                        let pos = path.iter().position(|&x| x == w).unwrap();
                        let mut cycle = path[pos..].to_vec();
                        cycle.push(w);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                path.pop();
                stack.pop();
            }
        }
    }
    None
}
