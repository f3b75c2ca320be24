//! Raw inputs of the policy: per-node features of every queued job and
//! per-ready-task features, plus the flat state layout.

use serde::{Deserialize, Serialize};

use crate::engine::{Simulator, TaskStatus};
use crate::nn::Tensor2;
use crate::profile::{mean_exec_time, JobProfile, ResourceProfile, TaskId};
use crate::scalar::Scalar;
use crate::schedule::TaskKey;

/// Width of a node feature row.
pub const NODE_FEATURES: usize = 4;

/// Static facts about the job DAG the model needs at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLayout {
    pub tasks: usize,
    pub children: Vec<Vec<TaskId>>,
    pub descendants: Vec<Vec<TaskId>>,
    /// Tasks grouped by height; level 0 holds the exit tasks.
    pub levels: Vec<Vec<TaskId>>,
    pub mean_exec: Vec<f64>,
    pub max_mean_exec: f64,
    pub max_out_degree: usize,
}

impl GraphLayout {
    pub fn new<T: Scalar>(job: &JobProfile<T>, resources: &ResourceProfile) -> Self {
        let n = job.len();
        let children: Vec<Vec<TaskId>> =
            (0..n).map(|t| job.successors(t).iter().map(|&(s, _)| s).collect()).collect();
        let mut height = vec![0usize; n];
        let mut descendants = vec![Vec::new(); n];
        for &t in job.topological_order().iter().rev() {
            let mut d: Vec<TaskId> = Vec::new();
            for &c in &children[t] {
                height[t] = height[t].max(height[c] + 1);
                d.push(c);
                d.extend_from_slice(&descendants[c]);
            }
            d.sort_unstable();
            d.dedup();
            descendants[t] = d;
        }
        let top = height.iter().copied().max().unwrap_or(0);
        let mut levels = vec![Vec::new(); top + 1];
        for t in 0..n {
            levels[height[t]].push(t);
        }
        let mean_exec: Vec<f64> = job
            .tasks()
            .iter()
            .map(|t| mean_exec_time(t, resources).expect("compatible profiles").as_f64())
            .collect();
        let max_mean_exec = mean_exec.iter().copied().fold(0.0, f64::max);
        let max_out_degree = children.iter().map(Vec::len).max().unwrap_or(0);
        Self { tasks: n, children, descendants, levels, mean_exec, max_mean_exec, max_out_degree }
    }
}

/// Normalization constants for time-valued features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScales {
    /// Durations are squashed with `tanh(d / time_scale)`.
    pub time_scale: f64,
}

impl Default for FeatureScales {
    fn default() -> Self {
        Self { time_scale: 100.0 }
    }
}

/// Everything the policy sees at one scheduling point.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<T> {
    /// Number of queued jobs (job slots in use).
    pub jobs: usize,
    /// `(jobs * tasks) x NODE_FEATURES`, row `slot * tasks + task`.
    pub nodes: Tensor2<T>,
    /// One row per ready task, in the order of `ready`.
    pub task_features: Tensor2<T>,
    pub ready: Vec<TaskKey>,
    /// Node-table row of each ready task.
    pub ready_rows: Vec<usize>,
    /// Job slot of each ready task.
    pub ready_slots: Vec<usize>,
}

/// `|PE status| + |job slot one-hot| + elapsed + remaining + |PE affinity|`.
pub fn task_feature_width(pes: usize, capacity: usize) -> usize {
    2 * pes + capacity + 2
}

fn squash(x: f64, scale: f64) -> f64 {
    (x.max(0.0) / scale).tanh()
}

/// Node features `(mean exec, out-degree, uncompleted descendants, ready)`,
/// each mapped into `[0, 1]`.
pub fn node_features<T: Scalar>(layout: &GraphLayout, status: &[TaskStatus]) -> Vec<[f64; NODE_FEATURES]> {
    let n = layout.tasks;
    (0..n)
        .map(|t| {
            let open = layout.descendants[t].iter().filter(|&&d| status[d] != TaskStatus::Completed).count();
            let ready = matches!(status[t], TaskStatus::Ready | TaskStatus::Executable);
            [
                layout.mean_exec[t] / layout.max_mean_exec.max(f64::MIN_POSITIVE),
                layout.children[t].len() as f64 / layout.max_out_degree.max(1) as f64,
                open as f64 / (n.max(2) - 1) as f64,
                if ready { 1.0 } else { 0.0 },
            ]
        })
        .collect()
}

/// Builds the observation for the ready set `ready` of `sim`.
pub fn observe<T: Scalar>(
    sim: &Simulator<'_, T>,
    layout: &GraphLayout,
    scales: &FeatureScales,
    ready: &[TaskKey],
) -> Observation<T> {
    let n = layout.tasks;
    let res = sim.resources();
    let capacity = sim.config().capacity;
    let clock = sim.clock().as_f64();
    let jobs: Vec<_> = sim.queued_jobs().collect();

    let mut nodes = Tensor2::zeros(jobs.len() * n, NODE_FEATURES);
    for (slot, j) in jobs.iter().enumerate() {
        let status: Vec<TaskStatus> = j.tasks.iter().map(|t| t.status).collect();
        for (t, f) in node_features::<T>(layout, &status).into_iter().enumerate() {
            for (c, v) in f.into_iter().enumerate() {
                nodes[(slot * n + t, c)] = T::of(v);
            }
        }
    }

    let pes = res.len();
    let width = task_feature_width(pes, capacity);
    let pe_status: Vec<f64> =
        (0..pes).map(|pe| squash(sim.pe_busy_until(pe).as_f64() - clock, scales.time_scale)).collect();
    let max_exec = layout.max_mean_exec.max(f64::MIN_POSITIVE);
    let mut task_features = Tensor2::zeros(ready.len(), width);
    let mut ready_rows = Vec::with_capacity(ready.len());
    let mut ready_slots = Vec::with_capacity(ready.len());
    for (k, key) in ready.iter().enumerate() {
        let slot = jobs.iter().position(|j| j.seq == key.job).expect("ready task belongs to a queued job");
        let job = jobs[slot];
        let spec = sim.job_profile().task(key.task);
        let row = task_features.row_mut(k);
        row[..pes].copy_from_slice(&pe_status.iter().map(|&v| T::of(v)).collect::<Vec<_>>());
        if slot < capacity {
            row[pes + slot] = T::one();
        }
        row[pes + capacity] = T::of(squash(clock - job.injected_at.as_f64(), scales.time_scale));
        row[pes + capacity + 1] = T::of(job.remaining() as f64 / n as f64);
        for pe in 0..pes {
            row[pes + capacity + 2 + pe] = match res.exec_time(spec, pe) {
                Some(w) => T::of((w.as_f64() / max_exec).min(1.0)),
                None => -T::one(),
            };
        }
        ready_rows.push(slot * n + key.task);
        ready_slots.push(slot);
    }
    Observation { jobs: jobs.len(), nodes, task_features, ready: ready.to_vec(), ready_rows, ready_slots }
}

/// Sizes of the flat state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub task_width: usize,
    pub embed_width: usize,
    pub max_ready: usize,
    pub max_nodes: usize,
    pub max_jobs: usize,
}

impl StateLayout {
    pub fn new(tasks: usize, pes: usize, capacity: usize, embed_width: usize) -> Self {
        Self {
            task_width: task_feature_width(pes, capacity),
            embed_width,
            max_ready: tasks * capacity,
            max_nodes: tasks * capacity,
            max_jobs: capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.task_width * self.max_ready + self.embed_width * (self.max_nodes + self.max_jobs + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Offset where the graph section (`{e} ‖ {y} ‖ z`) starts.
    pub fn graph_offset(&self) -> usize {
        self.task_width * self.max_ready
    }
}

/// Node, job and global embeddings of one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEmbedding<T> {
    /// One row per node, same row order as [`Observation::nodes`].
    pub nodes: Tensor2<T>,
    /// One row per queued job.
    pub jobs: Tensor2<T>,
    /// `1 x width`.
    pub global: Tensor2<T>,
}

/// `s = [φ ‖ {e} ‖ {y} ‖ z]`, each block zero-padded to its maximum size.
pub fn build_state<T: Scalar>(
    layout: &StateLayout,
    embedding: &GraphEmbedding<T>,
    task_features: &Tensor2<T>,
) -> Vec<T> {
    let mut s = vec![T::zero(); layout.len()];
    let copy_rows = |s: &mut [T], t: &Tensor2<T>, max_rows: usize, width: usize| {
        assert!(t.rows() <= max_rows, "{} rows exceed the layout bound {max_rows}", t.rows());
        assert!(t.rows() == 0 || t.cols() == width);
        s[..t.rows() * width].copy_from_slice(t.as_slice());
    };
    let d = layout.embed_width;
    let (phi, graph) = s.split_at_mut(layout.graph_offset());
    copy_rows(phi, task_features, layout.max_ready, layout.task_width);
    let (e, rest) = graph.split_at_mut(d * layout.max_nodes);
    copy_rows(e, &embedding.nodes, layout.max_nodes, d);
    let (y, z) = rest.split_at_mut(d * layout.max_jobs);
    copy_rows(y, &embedding.jobs, layout.max_jobs, d);
    copy_rows(z, &embedding.global, 1, d);
    s
}
