use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socsched::engine::{SimConfig, Simulator, TaskOrderer};
use socsched::neural::*;
use socsched::nn::{grad_check, Activation, ParamSet, Tape, Tensor2};
use socsched::profile::{Bundled, JobProfile, ResourceProfile, TaskSpec};
use socsched::schedulers::FifoOrderer;
use socsched::TaskKey;

fn toy() -> (JobProfile<f64>, ResourceProfile) {
    Bundled::Toy.load().unwrap()
}

/// Captures the observation at the first scheduling point.
struct Capture<'n> {
    net: &'n PolicyNet,
    obs: Option<Observation<f64>>,
}

impl TaskOrderer<f64> for Capture<'_> {
    fn order(&mut self, sim: &Simulator<'_, f64>, ready: &[TaskKey]) -> Vec<TaskKey> {
        if self.obs.is_none() {
            self.obs = Some(observe(sim, &self.net.layout, &self.net.config.scales, ready));
        }
        ready.to_vec()
    }
}

fn first_observation(
    net: &PolicyNet,
    job: &JobProfile<f64>,
    res: &ResourceProfile,
    cfg: SimConfig<f64>,
) -> Observation<f64> {
    let mut sim = Simulator::new(job, res, cfg).unwrap();
    let mut cap = Capture { net, obs: None };
    while cap.obs.is_none() && sim.step(&mut cap).unwrap().is_some() {}
    cap.obs.unwrap()
}

fn pss(capacity: usize) -> SimConfig<f64> {
    SimConfig {
        pseudo_steady_state: true,
        capacity,
        scale: Some(500.0),
        warmup: 0.0,
        sim_length: 200.0,
        ..SimConfig::default()
    }
}

#[test]
fn reward_examples() {
    assert_eq!(compute_reward::<f64>(&[JobSpan { start: 0.0, end: None }], 50.0), 0.0);
    let jobs = [
        JobSpan { start: 0.0, end: Some(30.0) },
        JobSpan { start: 10.0, end: Some(60.0) },
        JobSpan { start: 70.0, end: None },
    ];
    assert_eq!(compute_reward(&jobs, 80.0), -45.0);
    // one more unit of in-flight duration never raises the reward
    assert!(compute_reward(&jobs, 81.0) < compute_reward(&jobs, 80.0));
}

#[test]
fn hand_computed_three_jobs() {
    let jobs = [
        JobSpan { start: 0.0, end: Some(12.0) },
        JobSpan { start: 5.0, end: Some(25.0) },
        JobSpan { start: 20.0, end: Some(26.0) },
    ];
    // at t = 26 all three are done: -(12 + 20 + 6) / 3
    assert_eq!(compute_reward(&jobs, 26.0), -(12.0 + 20.0 + 6.0) / 3.0);
    // at t = 22 only the first is done: -(12 + 17 + 2) / 1
    assert_eq!(compute_reward(&jobs, 22.0), -31.0);
}

#[test]
fn truncation_reads_at_first_completion_or_next_step() {
    let jobs = [JobSpan { start: 0.0, end: Some(4.0) }, JobSpan { start: 0.0, end: None }];
    let steps = [
        StepTiming { time: 0.0, first_completion: Some(4.0) },
        StepTiming { time: 10.0, first_completion: None },
        StepTiming { time: 15.0, first_completion: Some(30.0) },
    ];
    let r = truncate_rewards(&steps, &jobs, 20.0);
    assert_eq!(r[0], compute_reward(&jobs, 4.0));
    assert_eq!(r[1], compute_reward(&jobs, 15.0));
    assert_eq!(r[2], compute_reward(&jobs, 20.0));

    // a no-op at 12 only changes the reward of the step it splits off
    let with_noop = [steps[0], steps[1], StepTiming { time: 12.0, first_completion: None }, steps[2]];
    let r2 = truncate_rewards(&with_noop, &jobs, 20.0);
    assert_eq!(r2[0], r[0]);
    assert_eq!(r2[1], compute_reward(&jobs, 12.0));
    assert_eq!(r2[3], r[2]);
}

#[test]
fn returns_and_baseline() {
    assert_eq!(returns(&[-1.0, -2.0, -3.0]), vec![-6.0, -5.0, -3.0]);
    let same = vec![vec![-3.0, -1.0], vec![-3.0, -1.0]];
    assert_eq!(rollout_mean_advantages(&same), vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
    let adv = rollout_mean_advantages::<f64>(&[vec![-4.0, -2.0, -1.0], vec![-2.0, -1.0]]);
    assert_eq!(adv[0], vec![-1.0, -0.5, 0.0]);
    assert_eq!(adv[1], vec![1.0, 0.5]);
    assert!((adv[0][0] + adv[1][0]).abs() < 1e-12);
}

#[test]
fn single_ready_task_has_probability_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let s = select_ordering(&[3.7], SelectMode::Sample, &mut rng);
    assert_eq!(s.order, vec![0]);
    assert_eq!(s.log_prob, 0.0);
    assert_eq!(s.entropy, 0.0);
}

#[test]
fn greedy_is_deterministic_and_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let logits = [0.3, 2.0, -1.0, 2.0, 0.9];
    let a = select_ordering(&logits, SelectMode::Greedy, &mut rng);
    let b = select_ordering(&logits, SelectMode::Greedy, &mut rng);
    assert_eq!(a.order, vec![1, 3, 4, 0, 2]);
    assert_eq!(a, b);
    let shifted: Vec<f64> = logits.iter().map(|x| x + 50.0).collect();
    assert_eq!(select_ordering(&shifted, SelectMode::Greedy, &mut rng).order, a.order);
}

#[test]
fn uniform_logits_give_uniform_positions() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let draws = 10_000;
    let mut counts = [[0usize; 4]; 4];
    for _ in 0..draws {
        let s = select_ordering(&[0.0; 4], SelectMode::Sample, &mut rng);
        for (pos, &task) in s.order.iter().enumerate() {
            counts[pos][task] += 1;
        }
    }
    // chi-square with 3 degrees of freedom per position, alpha = 0.01
    let expected = draws as f64 / 4.0;
    for row in counts {
        let chi: f64 = row.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi < 11.345, "chi-square {chi} for {row:?}");
    }
}

#[test]
fn leaf_with_zero_feature_and_identity_maps() {
    let job = JobProfile::new("one", vec![TaskSpec::new(0).with_exec(1, 1.0)]).unwrap();
    let res = ResourceProfile::from_types(&[1]).unwrap();
    let cfg = ModelConfig { hidden: vec![], activation: Activation::Identity, ..ModelConfig::default() };
    let (net, mut params) = PolicyNet::new(cfg, &job, &res, 1, 0);
    // zero every parameter so that f, g and the prep layer are zero maps
    for id in params.ids().collect::<Vec<_>>() {
        params.value_mut(id).fill(0.0);
    }
    let obs = Observation {
        jobs: 1,
        nodes: Tensor2::zeros(1, NODE_FEATURES),
        task_features: Tensor2::zeros(0, task_feature_width(1, 1)),
        ready: vec![],
        ready_rows: vec![],
        ready_slots: vec![],
    };
    let emb = net.embed_jobs(&params, &obs);
    assert_eq!(emb.nodes, Tensor2::zeros(1, net.embed_width()));
}

fn chain(reversed: bool) -> JobProfile<f64> {
    let (a, b) = if reversed { (1, 0) } else { (0, 1) };
    let mut tasks = vec![TaskSpec::new(0).with_exec(1, 3.0), TaskSpec::new(1).with_exec(1, 5.0)];
    tasks[b] = tasks[b].clone().with_pred(a, 1.0);
    JobProfile::new("chain", tasks).unwrap()
}

#[test]
fn edge_direction_matters() {
    let res = ResourceProfile::from_types(&[1]).unwrap();
    let fwd = chain(false);
    let rev = chain(true);
    let (net_f, params) = PolicyNet::new(ModelConfig::default(), &fwd, &res, 1, 3);
    let (net_r, _) = PolicyNet::new(ModelConfig::default(), &rev, &res, 1, 3);
    let mut nodes = Tensor2::zeros(2, NODE_FEATURES);
    nodes[(0, 0)] = 0.6;
    nodes[(1, 0)] = 1.0;
    let obs = Observation {
        jobs: 1,
        nodes,
        task_features: Tensor2::zeros(0, task_feature_width(1, 1)),
        ready: vec![],
        ready_rows: vec![],
        ready_slots: vec![],
    };
    let ef = net_f.embed_jobs(&params, &obs);
    let er = net_r.embed_jobs(&params, &obs);
    assert_ne!(ef.nodes.row(0), er.nodes.row(0));
}

#[test]
fn sibling_relabeling_leaves_embeddings_unchanged() {
    let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 2, 9);
    let obs = first_observation(&net, &job, &res, pss(2));
    let base = net.embed_jobs(&params, &obs);

    // swap two siblings (tasks 2 and 3 share parent 0) in the profile
    let swap = |t: usize| match t {
        2 => 3,
        3 => 2,
        t => t,
    };
    let tasks: Vec<TaskSpec<f64>> = job
        .tasks()
        .iter()
        .map(|t| {
            let mut s = TaskSpec::new(swap(t.id));
            s.exec_times = t.exec_times.clone();
            s.predecessors = t.predecessors.iter().map(|&(p, c)| (swap(p), c)).collect();
            s
        })
        .collect();
    let relabeled = JobProfile::new("swapped", tasks).unwrap();
    let (net2, _) = PolicyNet::new(ModelConfig::default(), &relabeled, &res, 2, 9);
    let obs2 = first_observation(&net2, &relabeled, &res, pss(2));
    let other = net2.embed_jobs(&params, &obs2);
    let n = job.len();
    for slot in 0..2 {
        for t in 0..n {
            let a = base.nodes.row(slot * n + t);
            let b = other.nodes.row(slot * n + swap(t));
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
    for (x, y) in base.global.as_slice().iter().zip(other.global.as_slice()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn embedding_locality() {
    let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 1, 5);
    let obs = first_observation(&net, &job, &res, pss(1));
    let base = net.embed_jobs(&params, &obs);
    let v = 4;
    let mut changed = obs.clone();
    changed.nodes[(v, 0)] += 0.5;
    let after = net.embed_jobs(&params, &changed);
    let layout = &net.layout;
    for w in 0..job.len() {
        let ancestor_or_self = w == v || layout.descendants[w].contains(&v);
        let same = base.nodes.row(w) == after.nodes.row(w);
        assert_eq!(same, !ancestor_or_self, "node {w}");
    }
}

#[test]
fn state_layout_and_padding() {
    let (job, res) = toy();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 12, 1);
    let l = net.state_layout;
    let phi = task_feature_width(res.len(), 12);
    assert_eq!(l.len(), phi * 2 * 12 + 8 * (2 * 12 + 12 + 1));

    // empty queue: graph section is zero except the global summary of
    // nothing, and phi reflects idle PEs
    let empty = Observation {
        jobs: 0,
        nodes: Tensor2::zeros(0, NODE_FEATURES),
        task_features: Tensor2::zeros(0, phi),
        ready: vec![],
        ready_rows: vec![],
        ready_slots: vec![],
    };
    let s = net.state(&params, &empty);
    assert_eq!(s.len(), l.len());
    let z_at = l.graph_offset() + 8 * (l.max_nodes + l.max_jobs);
    assert!(s[..z_at].iter().all(|&x| x == 0.0));

    let obs = first_observation(&net, &job, &res, pss(12));
    assert_eq!(net.state(&params, &obs).len(), l.len());
}

#[test]
fn busy_pe_only_changes_phi_section() {
    let (job, res) = toy();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 4, 2);
    let obs = first_observation(&net, &job, &res, pss(4));
    let mut other = obs.clone();
    for r in 0..other.task_features.rows() {
        other.task_features[(r, 0)] = 0.7;
    }
    let a = net.state(&params, &obs);
    let b = net.state(&params, &other);
    let g = net.state_layout.graph_offset();
    assert_ne!(a[..g], b[..g]);
    assert_eq!(a[g..], b[g..]);
}

#[test]
fn features_are_bounded() {
    let (job, res) = Bundled::Wifi.load::<f64>().unwrap();
    let (net, _) = PolicyNet::new(ModelConfig::default(), &job, &res, 12, 2);
    let obs = first_observation(&net, &job, &res, pss(12));
    assert!(obs.nodes.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
    assert!(obs.task_features.as_slice().iter().all(|&x| (-1.0..=1.0).contains(&x)));
}

fn toy_episode(seed: u64) -> (PolicyNet, ParamSet<f64>, Trajectory<f64>, Trajectory<f64>) {
    let (job, res) = toy();
    let cfg = ModelConfig { hidden: vec![6], embed_width: 4, ..ModelConfig::default() };
    let (net, params) = PolicyNet::new(cfg, &job, &res, 2, seed);
    let sim = SimConfig {
        pseudo_steady_state: true,
        capacity: 2,
        scale: Some(500.0),
        sim_length: 40.0,
        warmup: 0.0,
        seed,
        ..SimConfig::default()
    };
    let a = run_rollout(&job, &res, sim.clone(), &net, &params, SelectMode::Sample, seed, 0, 0).unwrap();
    let b = run_rollout(&job, &res, sim, &net, &params, SelectMode::Sample, seed + 1, 0, 1).unwrap();
    (net, params, a, b)
}

#[test]
fn objective_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..100 {
        let (net, params, a, b) = toy_episode(case);
        let group = vec![a, b];
        let (adv, rets) = advantages(&net, &params, &group, BaselineKind::RolloutMean);
        let beta = rng.random_range(0.0..1.0);
        let mut terms = Vec::new();
        for ((traj, adv), rets) in group.iter().zip(&adv).zip(&rets) {
            for ((tr, &a), &g) in traj.transitions.iter().zip(adv).zip(rets) {
                if let (Some(obs), Some(order)) = (&tr.obs, &tr.action) {
                    terms.push(PolicyTerm { obs, order, advantage: a, target: g });
                }
            }
        }
        assert!(!terms.is_empty());
        let report = grad_check(
            &params,
            |p: &ParamSet<f64>, tape: &mut Tape<f64>| surrogate_loss(&net, p, tape, &terms, beta, 0.5, 0.5),
            1e-5,
            1e-4,
        );
        assert!(report.passed(), "case {case}: {report:?}");
    }
}

#[test]
fn identical_rollouts_only_move_entropy() {
    let (net, params, a, _) = toy_episode(3);
    let group = vec![a.clone(), a];
    let (adv, _) = advantages(&net, &params, &group, BaselineKind::RolloutMean);
    assert!(adv.iter().flatten().all(|&x| x == 0.0));
    let cfg = TrainConfig::default();
    let mut with_beta = TrainState::new(params.clone(), &cfg);
    policy_update(&net, &mut with_beta, std::slice::from_ref(&group), 0.0, &cfg);
    // beta = 0 and zero advantages: the gradient is exactly zero, so Adam
    // leaves every weight where it was
    assert_eq!(with_beta.params, params);
    let mut state = TrainState::new(params.clone(), &cfg);
    policy_update(&net, &mut state, &[group], 1.0, &cfg);
    assert_ne!(state.params, params);
}

#[test]
fn single_action_has_zero_entropy_gradient() {
    let (job, res) = toy();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 1, 0);
    let obs = first_observation(&net, &job, &res, pss(1));
    assert_eq!(obs.ready.len(), 1);
    let term = PolicyTerm { obs: &obs, order: &[0], advantage: 0.0, target: 0.0 };
    let mut p = params.clone();
    p.zero_grad();
    let mut tape = Tape::new();
    let l = surrogate_loss(&net, &p.clone(), &mut tape, &[term], 1.0, 0.0, 1.0);
    tape.backward(l, &mut p);
    assert!(p.ids().all(|id| p.grad(id).as_slice().iter().all(|&g| g == 0.0)));
}

#[test]
fn rewards_are_never_positive() {
    for seed in 0..100 {
        let (_, _, a, b) = toy_episode(seed);
        for t in a.transitions.iter().chain(&b.transitions) {
            assert!(t.reward <= 0.0);
        }
        assert!(a.total_return() <= 0.0);
    }
}

#[test]
fn rollout_records_noops() {
    let (job, res) = toy();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 1, 0);
    let cfg = SimConfig {
        pseudo_steady_state: true,
        capacity: 1,
        scale: None,
        sim_length: 100.0,
        warmup: 0.0,
        ..SimConfig::default()
    };
    let t = run_rollout(&job, &res, cfg, &net, &params, SelectMode::Greedy, 0, 0, 0).unwrap();
    // schedule task 0, no-op... then task 1, and a final no-op when the job ends
    assert!(t.transitions.iter().any(|x| x.is_noop()));
    assert_eq!(t.decisions(), 2);
    assert_eq!(t.metrics.completed, 1);
}

#[test]
fn greedy_evaluation_is_deterministic() {
    let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
    let (net, params) = PolicyNet::new(ModelConfig::default(), &job, &res, 12, 4);
    let cfg = SimConfig { sim_length: 1_000.0, warmup: 0.0, seed: 8, ..SimConfig::default() };
    let run = || {
        let mut o = NeuralOrderer::new(&net, &params, SelectMode::Greedy, 0);
        socsched::engine::run_episode(&job, &res, cfg.clone(), &mut o).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.record, b.record);
    assert_eq!(a.metrics, b.metrics);
    let fifo = socsched::engine::run_episode(&job, &res, cfg.clone(), &mut FifoOrderer).unwrap();
    assert!(fifo.metrics.completed > 0);
}

#[test]
fn zero_episode_stage_keeps_params() {
    let (job, res) = toy();
    let cfg = TrainConfig { stages: vec![Stage { scale: 500.0, episodes: 0 }], ..TrainConfig::default() };
    let (net, mut state) = init_training(&job, &res, &cfg);
    let before = state.params.clone();
    let logs = train_curriculum(&job, &res, &cfg, &net, &mut state, |_, _| {}).unwrap();
    assert!(logs.is_empty());
    assert_eq!(state.params, before);
}

#[test]
fn checkpoint_reload_gives_identical_greedy_policy() {
    let (job, res) = toy();
    let cfg = TrainConfig {
        stages: vec![Stage { scale: 500.0, episodes: 3 }],
        sim_length: 60.0,
        rollouts: 2,
        ..TrainConfig::default()
    };
    let (net, mut state) = init_training(&job, &res, &cfg);
    train_curriculum(&job, &res, &cfg, &net, &mut state, |_, _| {}).unwrap();
    let dir = tempfile::tempdir().unwrap();
    state.save(dir.path(), &cfg).unwrap();
    let (_, mut loaded) = init_training(&job, &res, &cfg);
    let stored = loaded.load(dir.path()).unwrap();
    assert_eq!(stored, cfg);
    assert_eq!(loaded, state);
    let sim = cfg.sim_config::<f64>(500.0, 1);
    let a = run_rollout(&job, &res, sim.clone(), &net, &state.params, SelectMode::Greedy, 0, 0, 0).unwrap();
    let b = run_rollout(&job, &res, sim, &net, &loaded.params, SelectMode::Greedy, 0, 0, 0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn resume_equals_uninterrupted() {
    let (job, res) = toy();
    let cfg = TrainConfig {
        stages: vec![Stage { scale: 500.0, episodes: 2 }, Stage { scale: 250.0, episodes: 2 }],
        sim_length: 60.0,
        rollouts: 2,
        ..TrainConfig::default()
    };
    let (net, mut full) = init_training(&job, &res, &cfg);
    let full_logs = train_curriculum(&job, &res, &cfg, &net, &mut full, |_, _| {}).unwrap();

    let first_half = TrainConfig {
        stages: vec![Stage { scale: 500.0, episodes: 2 }, Stage { scale: 250.0, episodes: 1 }],
        ..cfg.clone()
    };
    let (_, mut part) = init_training(&job, &res, &cfg);
    let mut logs = train_curriculum(&job, &res, &first_half, &net, &mut part, |_, _| {}).unwrap();
    let dir = tempfile::tempdir().unwrap();
    part.save(dir.path(), &cfg).unwrap();
    let (_, mut resumed) = init_training(&job, &res, &cfg);
    resumed.load(dir.path()).unwrap();
    logs.extend(train_curriculum(&job, &res, &cfg, &net, &mut resumed, |_, _| {}).unwrap());
    assert_eq!(resumed, full);
    assert_eq!(logs, full_logs);
}
