//! Discrete-event simulator of the SoC job life cycle.
//!
//! Jobs arrive with exponential gaps and enter a capacity-bounded job queue
//! (arrivals at a full queue wait outside and enter at the next job
//! completion). Entry tasks become *ready*; at every scheduling point the
//! ready queue is handed to a [`TaskOrderer`], the returned ordering is
//! mapped onto PEs by the insertion-based EFT manager, and the assigned
//! tasks wait in the *executable* queue of their PE. An idle PE starts its
//! earliest-planned executable task once that task's inputs have arrived.
//! Every scheduling point (and every task completion) first reloads the
//! executable tasks that have not started back into the ready queue.
//!
//! Events at equal timestamps are handled completions first, then arrivals,
//! then PE wake-ups; completions are ordered by `(job, task)`.

mod export;
mod metrics;
mod noise;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::heuristics::{eft_select, FinishedTasks, Interval, PeTimeline, ScheduleError};
use crate::profile::{mean_exec_time, JobProfile, PeId, ResourceProfile, TaskId};
use crate::scalar::{total_cmp, Scalar};
use crate::schedule::{Placement, ScheduleRecord, TaskKey};

pub use export::{event_log_text, gantt_csv, metrics_json, write_gantt_csv};
pub use metrics::{average_latency, Latency, Metrics};
pub use noise::{draw_exec_time, ArrivalProcess, NoiseModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("scheduler contract violation: {0}")]
    ContractViolation(String),
    #[error("task {task} cannot run on PE {pe}")]
    UnsupportedPlacement { task: TaskId, pe: PeId },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("invalid simulation config: {0}")]
    Config(String),
}

/// Simulation parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    /// The run stops once the next event lies beyond this time.
    pub sim_length: T,
    /// Jobs admitted before this time are excluded from metrics.
    pub warmup: T,
    /// Mean job inter-arrival gap; `None` disables injection.
    pub scale: Option<T>,
    /// Job queue capacity.
    pub capacity: usize,
    pub noise: NoiseModel<T>,
    /// Start with the job queue filled to capacity at time 0.
    pub pseudo_steady_state: bool,
    pub seed: u64,
    /// Stop generating arrivals after this many jobs.
    pub max_jobs: Option<u64>,
    pub record_events: bool,
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            sim_length: T::of(100_000.0),
            warmup: T::of(20_000.0),
            scale: Some(T::of(50.0)),
            capacity: 12,
            noise: NoiseModel::none(),
            pseudo_steady_state: false,
            seed: 0,
            max_jobs: None,
            record_events: false,
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    // Comparisons are negated so that NaN fails them.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Config(m.to_string()));
        if !(self.sim_length >= T::zero()) {
            return bad("sim_length must be >= 0");
        }
        if !(self.warmup >= T::zero()) {
            return bad("warmup must be >= 0");
        }
        if self.capacity == 0 {
            return bad("capacity must be >= 1");
        }
        if let Some(s) = self.scale {
            if !(s > T::zero()) {
                return bad("scale must be > 0");
            }
        }
        if !(self.noise.sigma_fraction >= T::zero()) || !(self.noise.floor > T::zero()) {
            return bad("noise sigma must be >= 0 and floor > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskStatus {
    Waiting,
    Ready,
    Executable,
    Running,
    Completed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskInstance<T> {
    pub status: TaskStatus,
    pub assigned_pe: Option<PeId>,
    pub planned_start: Option<T>,
    pub start: Option<T>,
    pub finish: Option<T>,
    pub drawn_exec_time: Option<T>,
    pending_preds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobInstance<T> {
    pub seq: u64,
    pub injected_at: T,
    pub completed_at: Option<T>,
    pub tasks: Vec<TaskInstance<T>>,
    remaining: usize,
}

impl<T: Scalar> JobInstance<T> {
    /// Tasks not yet completed.
    pub fn remaining(&self) -> usize {
        self.remaining
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedJob<T> {
    pub seq: u64,
    pub injected_at: T,
    pub completed_at: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningTask<T> {
    pub key: TaskKey,
    pub start: T,
    pub finish: T,
    /// Start plus the nominal execution time; what schedulers get to see.
    pub expected_finish: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrive,
    Defer,
    Admit,
    Ready,
    Assign,
    Reload,
    Start,
    Complete,
    JobDone,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Arrive => "arrive",
            EventKind::Defer => "defer",
            EventKind::Admit => "admit",
            EventKind::Ready => "ready",
            EventKind::Assign => "assign",
            EventKind::Reload => "reload",
            EventKind::Start => "start",
            EventKind::Complete => "complete",
            EventKind::JobDone => "job-done",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry<T> {
    pub clock: T,
    pub kind: EventKind,
    pub job: Option<u64>,
    pub task: Option<TaskId>,
    pub pe: Option<PeId>,
}

/// What happened during one call to [`Simulator::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick<T> {
    pub time: T,
    pub completions: usize,
    pub arrivals: usize,
    pub scheduled: bool,
}

/// Ordering policy invoked at every scheduling point.
pub trait TaskOrderer<T: Scalar> {
    /// Returns a permutation of `ready` (which is sorted by key).
    fn order(&mut self, sim: &Simulator<'_, T>, ready: &[TaskKey]) -> Vec<TaskKey>;

    /// Called once per processed timestamp, after events, scheduling and
    /// dispatch.
    fn observe(&mut self, _sim: &Simulator<'_, T>, _tick: &Tick<T>) {}
}

#[derive(Debug, Clone, Copy)]
enum EventClass {
    Completion { key: TaskKey, pe: PeId },
    Wake { pe: PeId },
}

#[derive(Debug, Clone, Copy)]
struct Event<T> {
    time: T,
    class: EventClass,
}

impl<T: Scalar> Event<T> {
    fn rank(&self) -> (u8, TaskKey, PeId) {
        match self.class {
            EventClass::Completion { key, pe } => (0, key, pe),
            EventClass::Wake { pe } => (2, TaskKey::new(0, 0), pe),
        }
    }
}

impl<T: Scalar> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Event<T> {}
impl<T: Scalar> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Event<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        total_cmp(self.time, other.time).then_with(|| self.rank().cmp(&other.rank()))
    }
}

/// Full dynamic state of one simulation run.
pub struct Simulator<'a, T: Scalar> {
    job: &'a JobProfile<T>,
    resources: &'a ResourceProfile,
    config: SimConfig<T>,
    mean_exec: Vec<T>,

    clock: T,
    events: BinaryHeap<Reverse<Event<T>>>,
    next_arrival: Option<T>,
    arrivals: ArrivalProcess,
    injection_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,

    jobs: BTreeMap<u64, JobInstance<T>>,
    deferred: VecDeque<u64>,
    completed: Vec<CompletedJob<T>>,
    generated: u64,

    ready: BTreeSet<TaskKey>,
    executable: Vec<Vec<TaskKey>>,
    running: Vec<Option<RunningTask<T>>>,
    wake_at: Vec<Option<T>>,

    record: ScheduleRecord<T>,
    log: Vec<LogEntry<T>>,
    finished: bool,
}

struct SimFinished<'s, T>(&'s BTreeMap<u64, JobInstance<T>>);

impl<T: Scalar> FinishedTasks<T> for SimFinished<'_, T> {
    fn placement(&self, key: TaskKey) -> Option<Placement<T>> {
        let t = &self.0.get(&key.job)?.tasks[key.task];
        match (t.status, t.assigned_pe, t.start, t.finish) {
            (TaskStatus::Completed, Some(pe), Some(start), Some(finish)) => {
                Some(Placement { pe, start, finish })
            }
            _ => None,
        }
    }
}

impl<'a, T: Scalar> Simulator<'a, T> {
    pub fn new(
        job: &'a JobProfile<T>,
        resources: &'a ResourceProfile,
        config: SimConfig<T>,
    ) -> Result<Self, SimError> {
        config.validate()?;
        crate::profile::check_compatible(job, resources).map_err(|e| SimError::Config(e.to_string()))?;
        let mean_exec =
            job.tasks().iter().map(|t| mean_exec_time(t, resources).expect("compatible profiles")).collect();
        let mut injection_rng = ChaCha8Rng::seed_from_u64(config.seed);
        injection_rng.set_stream(1);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
        noise_rng.set_stream(2);
        let npes = resources.len();
        let mut sim = Self {
            job,
            resources,
            arrivals: ArrivalProcess::new(config.scale),
            config,
            mean_exec,
            clock: T::zero(),
            events: BinaryHeap::new(),
            next_arrival: None,
            injection_rng,
            noise_rng,
            jobs: BTreeMap::new(),
            deferred: VecDeque::new(),
            completed: Vec::new(),
            generated: 0,
            ready: BTreeSet::new(),
            executable: vec![Vec::new(); npes],
            running: vec![None; npes],
            wake_at: vec![None; npes],
            record: ScheduleRecord::new(),
            log: Vec::new(),
            finished: false,
        };
        if sim.config.pseudo_steady_state {
            sim.init_pseudo_steady_state();
        }
        sim.next_arrival = sim.draw_next_arrival(T::zero());
        Ok(sim)
    }

    // ---- read-only view -------------------------------------------------

    pub fn clock(&self) -> T {
        self.clock
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.config
    }

    pub fn job_profile(&self) -> &'a JobProfile<T> {
        self.job
    }

    pub fn resources(&self) -> &'a ResourceProfile {
        self.resources
    }

    /// Mean execution time of each profile task over supporting PEs.
    pub fn mean_exec_times(&self) -> &[T] {
        &self.mean_exec
    }

    /// Jobs in the job queue, in admission order.
    pub fn queued_jobs(&self) -> impl Iterator<Item = &JobInstance<T>> {
        self.jobs.values()
    }

    pub fn queued_job(&self, seq: u64) -> Option<&JobInstance<T>> {
        self.jobs.get(&seq)
    }

    pub fn queue_len(&self) -> usize {
        self.jobs.len()
    }

    pub fn completed_jobs(&self) -> &[CompletedJob<T>] {
        &self.completed
    }

    pub fn deferred_count(&self) -> usize {
        self.deferred.len()
    }

    /// Total jobs generated so far, including pseudo-steady-state jobs and
    /// jobs still waiting outside the full queue.
    pub fn injected(&self) -> u64 {
        self.generated
    }

    pub fn ready_tasks(&self) -> impl Iterator<Item = TaskKey> + '_ {
        self.ready.iter().copied()
    }

    pub fn executable_tasks(&self, pe: PeId) -> &[TaskKey] {
        &self.executable[pe]
    }

    pub fn running_task(&self, pe: PeId) -> Option<&RunningTask<T>> {
        self.running[pe].as_ref()
    }

    /// Time at which `pe` is expected to be free, as seen by schedulers
    /// (nominal execution times, never earlier than the clock).
    pub fn pe_busy_until(&self, pe: PeId) -> T {
        self.running[pe].map_or(self.clock, |r| r.expected_finish.max(self.clock))
    }

    pub fn task(&self, key: TaskKey) -> Option<&TaskInstance<T>> {
        self.jobs.get(&key.job).map(|j| &j.tasks[key.task])
    }

    pub fn record(&self) -> &ScheduleRecord<T> {
        &self.record
    }

    pub fn event_log(&self) -> &[LogEntry<T>] {
        &self.log
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    // ---- life cycle ------------------------------------------------------

    fn log(&mut self, kind: EventKind, job: Option<u64>, task: Option<TaskId>, pe: Option<PeId>) {
        if self.config.record_events {
            self.log.push(LogEntry { clock: self.clock, kind, job, task, pe });
        }
    }

    fn may_generate(&self) -> bool {
        self.config.max_jobs.is_none_or(|m| self.generated < m)
    }

    fn draw_next_arrival(&mut self, from: T) -> Option<T> {
        if !self.may_generate() {
            return None;
        }
        self.arrivals.next_gap::<T, _>(&mut self.injection_rng).map(|g| from + g)
    }

    fn admit(&mut self, seq: u64) {
        let n = self.job.len();
        let tasks = (0..n)
            .map(|i| TaskInstance {
                status: TaskStatus::Waiting,
                assigned_pe: None,
                planned_start: None,
                start: None,
                finish: None,
                drawn_exec_time: None,
                pending_preds: self.job.predecessors(i).len(),
            })
            .collect();
        self.jobs.insert(
            seq,
            JobInstance { seq, injected_at: self.clock, completed_at: None, tasks, remaining: n },
        );
        self.log(EventKind::Admit, Some(seq), None, None);
        for &t in self.job.entry_tasks() {
            self.make_ready(TaskKey::new(seq, t));
        }
    }

    fn make_ready(&mut self, key: TaskKey) {
        let t = &mut self.jobs.get_mut(&key.job).unwrap().tasks[key.task];
        t.status = TaskStatus::Ready;
        t.assigned_pe = None;
        t.planned_start = None;
        self.ready.insert(key);
        self.log(EventKind::Ready, Some(key.job), Some(key.task), None);
    }

    fn generate(&mut self) {
        let seq = self.generated;
        self.generated += 1;
        self.log(EventKind::Arrive, Some(seq), None, None);
        if self.jobs.len() < self.config.capacity && self.deferred.is_empty() {
            self.admit(seq);
        } else {
            self.deferred.push_back(seq);
            self.log(EventKind::Defer, Some(seq), None, None);
        }
    }

    /// Fills the job queue to capacity at the current clock (time 0 on a
    /// fresh simulator).
    pub fn init_pseudo_steady_state(&mut self) {
        while self.jobs.len() < self.config.capacity && self.may_generate() {
            let seq = self.generated;
            self.generated += 1;
            self.log(EventKind::Arrive, Some(seq), None, None);
            self.admit(seq);
        }
    }

    /// Generates every arrival due at or before the clock.
    pub fn inject_jobs(&mut self) -> usize {
        let mut count = 0;
        while let Some(at) = self.next_arrival {
            if at > self.clock {
                break;
            }
            self.generate();
            count += 1;
            self.next_arrival = self.draw_next_arrival(at);
        }
        count
    }

    fn next_event_time(&self) -> Option<T> {
        if !self.ready.is_empty() {
            return Some(self.clock);
        }
        let ev = self.events.peek().map(|Reverse(e)| e.time);
        match (ev, self.next_arrival) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn complete(&mut self, key: TaskKey, pe: PeId) {
        let now = self.clock;
        let run = self.running[pe].take().expect("completion of a running task");
        debug_assert_eq!(run.key, key);
        let job = self.jobs.get_mut(&key.job).unwrap();
        let t = &mut job.tasks[key.task];
        t.status = TaskStatus::Completed;
        t.finish = Some(now);
        job.remaining -= 1;
        let job_done = job.remaining == 0;
        self.record.push(key, Placement { pe, start: run.start, finish: now });
        self.log(EventKind::Complete, Some(key.job), Some(key.task), Some(pe));

        let mut newly_ready = Vec::new();
        for &(s, _) in self.job.successors(key.task) {
            let st = &mut self.jobs.get_mut(&key.job).unwrap().tasks[s];
            st.pending_preds -= 1;
            if st.pending_preds == 0 {
                newly_ready.push(TaskKey::new(key.job, s));
            }
        }
        for k in newly_ready {
            self.make_ready(k);
        }

        if job_done {
            let mut job = self.jobs.remove(&key.job).unwrap();
            job.completed_at = Some(now);
            self.completed.push(CompletedJob {
                seq: job.seq,
                injected_at: job.injected_at,
                completed_at: now,
            });
            self.log(EventKind::JobDone, Some(key.job), None, None);
            while self.jobs.len() < self.config.capacity {
                match self.deferred.pop_front() {
                    Some(seq) => self.admit(seq),
                    None => break,
                }
            }
        }
    }

    /// Moves every assigned-but-not-started task back to the ready queue.
    fn reload_executable(&mut self) {
        for pe in 0..self.executable.len() {
            for key in std::mem::take(&mut self.executable[pe]) {
                self.log(EventKind::Reload, Some(key.job), Some(key.task), Some(pe));
                self.make_ready(key);
            }
        }
    }

    fn timelines(&self) -> Vec<PeTimeline<T>> {
        self.running
            .iter()
            .map(|r| {
                let mut tl = PeTimeline::new();
                if let Some(r) = r {
                    tl.insert(Interval {
                        start: r.start,
                        finish: r.expected_finish.max(self.clock),
                        owner: r.key,
                    });
                }
                tl
            })
            .collect()
    }

    fn schedule(&mut self, orderer: &mut dyn TaskOrderer<T>) -> Result<(), SimError> {
        self.reload_executable();
        let ready: Vec<TaskKey> = self.ready.iter().copied().collect();
        let order = orderer.order(self, &ready);
        let mut check = order.clone();
        check.sort_unstable();
        if check != ready {
            return Err(SimError::ContractViolation(format!(
                "ordering of {} tasks is not a permutation of the {} ready tasks",
                order.len(),
                ready.len()
            )));
        }
        let mut timelines = self.timelines();
        let mut placements = Vec::with_capacity(order.len());
        {
            let finished = SimFinished(&self.jobs);
            for &key in &order {
                let p = eft_select(self.job, self.resources, key, &mut timelines, &finished, self.clock)?;
                placements.push((key, p));
            }
        }
        self.ready.clear();
        for (key, p) in placements {
            let t = &mut self.jobs.get_mut(&key.job).unwrap().tasks[key.task];
            t.status = TaskStatus::Executable;
            t.assigned_pe = Some(p.pe);
            t.planned_start = Some(p.start);
            self.executable[p.pe].push(key);
            self.log(EventKind::Assign, Some(key.job), Some(key.task), Some(p.pe));
        }
        Ok(())
    }

    fn input_ready_time(&self, key: TaskKey, pe: PeId) -> T {
        let finished = SimFinished(&self.jobs);
        crate::heuristics::data_ready_time(self.job, key, pe, &finished, self.clock)
            .expect("executable tasks have completed predecessors")
    }

    fn dispatch(&mut self, pe: PeId) -> Result<(), SimError> {
        if self.running[pe].is_some() || self.executable[pe].is_empty() {
            return Ok(());
        }
        let (idx, key) = {
            let jobs = &self.jobs;
            let planned = |k: &TaskKey| jobs[&k.job].tasks[k.task].planned_start.unwrap();
            self.executable[pe]
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| total_cmp(planned(a), planned(b)).then(a.cmp(b)))
                .map(|(i, &k)| (i, k))
                .unwrap()
        };
        let ready_at = self.input_ready_time(key, pe);
        if ready_at > self.clock {
            if self.wake_at[pe] != Some(ready_at) {
                self.wake_at[pe] = Some(ready_at);
                self.events.push(Reverse(Event { time: ready_at, class: EventClass::Wake { pe } }));
            }
            return Ok(());
        }
        self.executable[pe].remove(idx);
        let spec = self.job.task(key.task);
        let nominal = self
            .resources
            .exec_time(spec, pe)
            .ok_or(SimError::UnsupportedPlacement { task: key.task, pe })?;
        let duration = draw_exec_time(spec, pe, self.resources, &self.config.noise, &mut self.noise_rng)?;
        let now = self.clock;
        let t = &mut self.jobs.get_mut(&key.job).unwrap().tasks[key.task];
        t.status = TaskStatus::Running;
        t.start = Some(now);
        t.drawn_exec_time = Some(duration);
        self.running[pe] =
            Some(RunningTask { key, start: now, finish: now + duration, expected_finish: now + nominal });
        self.events.push(Reverse(Event { time: now + duration, class: EventClass::Completion { key, pe } }));
        self.log(EventKind::Start, Some(key.job), Some(key.task), Some(pe));
        Ok(())
    }

    /// Processes every event at the next timestamp. Returns `None` once the
    /// next event lies beyond `sim_length` (the run is then finished).
    pub fn step(&mut self, orderer: &mut dyn TaskOrderer<T>) -> Result<Option<Tick<T>>, SimError> {
        if self.finished {
            return Ok(None);
        }
        let now = match self.next_event_time() {
            Some(t) if t <= self.config.sim_length => t,
            _ => {
                self.finished = true;
                return Ok(None);
            }
        };
        debug_assert!(now >= self.clock);
        self.clock = now;

        let mut completions = 0;
        while let Some(Reverse(ev)) = self.events.peek().copied() {
            match ev.class {
                EventClass::Completion { key, pe } if ev.time <= now => {
                    self.events.pop();
                    self.complete(key, pe);
                    completions += 1;
                }
                _ => break,
            }
        }
        let arrivals = self.inject_jobs();
        while let Some(Reverse(ev)) = self.events.peek().copied() {
            if ev.time > now {
                break;
            }
            self.events.pop();
            if let EventClass::Wake { pe } = ev.class {
                if self.wake_at[pe] == Some(ev.time) {
                    self.wake_at[pe] = None;
                }
            }
        }

        let pending_executable = self.executable.iter().any(|q| !q.is_empty());
        let scheduled = !self.ready.is_empty() || (completions > 0 && pending_executable);
        if scheduled {
            self.schedule(orderer)?;
        }
        for pe in 0..self.running.len() {
            self.dispatch(pe)?;
        }
        let tick = Tick { time: now, completions, arrivals, scheduled };
        orderer.observe(self, &tick);
        Ok(Some(tick))
    }

    /// Runs until `sim_length`.
    pub fn run(&mut self, orderer: &mut dyn TaskOrderer<T>) -> Result<(), SimError> {
        while self.step(orderer)?.is_some() {}
        Ok(())
    }

    /// Average latency over completed jobs admitted at or after warm-up.
    pub fn compute_latency(&self) -> Latency<T> {
        average_latency(self.counted_jobs().map(|j| (j.injected_at, j.completed_at)))
    }

    fn counted_jobs(&self) -> impl Iterator<Item = &CompletedJob<T>> {
        let warmup = self.config.warmup;
        self.completed.iter().filter(move |j| j.injected_at >= warmup)
    }

    pub fn metrics(&self) -> Metrics<T> {
        Metrics {
            completed: self.counted_jobs().count(),
            latency: self.compute_latency(),
            injected: self.generated,
            sim_length: self.config.sim_length,
            warmup: self.config.warmup,
            scale: self.config.scale,
            seed: self.config.seed,
        }
    }

    /// Jobs in flight: admitted and not completed.
    pub fn in_flight(&self) -> usize {
        self.jobs.len()
    }
}

/// Record, metrics and (optionally) event log of a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult<T> {
    pub record: ScheduleRecord<T>,
    pub metrics: Metrics<T>,
    pub events: Vec<LogEntry<T>>,
}

/// Simulates one episode from a fresh state.
pub fn run_episode<T: Scalar>(
    job: &JobProfile<T>,
    resources: &ResourceProfile,
    config: SimConfig<T>,
    orderer: &mut dyn TaskOrderer<T>,
) -> Result<EpisodeResult<T>, SimError> {
    let mut sim = Simulator::new(job, resources, config)?;
    sim.run(orderer)?;
    Ok(EpisodeResult {
        metrics: sim.metrics(),
        record: std::mem::take(&mut sim.record),
        events: std::mem::take(&mut sim.log),
    })
}
