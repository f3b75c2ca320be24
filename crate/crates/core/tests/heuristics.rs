use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socsched::gen::{random_job, random_resources, resources, DagSpec};
use socsched::heuristics::{
    brute_force_optimal, compute_rank_u, eft_select, eft_select_append, est, heft_order,
    heft_static_schedule, Interval, PeTimeline, DEFAULT_ORACLE_LIMIT,
};
use socsched::profile::{mean_exec_time, Bundled, ResourceProfile, TaskSpec};
use socsched::verify::{verify_schedule, VerifyOptions};
use socsched::{JobProfile, Placement, TaskKey};

fn key(t: usize) -> TaskKey {
    TaskKey::new(0, t)
}

/// Straightforward memoized upward rank, kept separate from the library.
fn reference_ranks(job: &JobProfile, res: &ResourceProfile) -> Vec<f64> {
    fn go(t: usize, job: &JobProfile, res: &ResourceProfile, memo: &mut Vec<Option<f64>>) -> f64 {
        if let Some(v) = memo[t] {
            return v;
        }
        let w = mean_exec_time(job.task(t), res).unwrap();
        let tail = job
            .successors(t)
            .to_vec()
            .into_iter()
            .map(|(s, c)| c + go(s, job, res, memo))
            .fold(0.0, f64::max);
        memo[t] = Some(w + tail);
        w + tail
    }
    let mut memo = vec![None; job.len()];
    (0..job.len()).map(|t| go(t, job, res, &mut memo)).collect()
}

#[test]
fn rank_examples() {
    let res = resources(&[1]);
    let exit: JobProfile = JobProfile::new("x", vec![TaskSpec::new(0).with_exec(1, 14.67)]).unwrap();
    assert_eq!(compute_rank_u(&exit, &res).get(0), 14.67);

    let chain: JobProfile = JobProfile::new(
        "ab",
        vec![TaskSpec::new(0).with_exec(1, 10.0), TaskSpec::new(1).with_exec(1, 5.0).with_pred(0, 3.0)],
    )
    .unwrap();
    let r = compute_rank_u(&chain, &res);
    assert_eq!((r.get(0), r.get(1)), (18.0, 5.0));

    let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
    assert_eq!(compute_rank_u(&job, &res).as_slice(), reference_ranks(&job, &res).as_slice());
}

#[test]
fn heft_order_examples() {
    // A = task 0 (80), B = task 1 (77), C = task 2 (80)
    let job: JobProfile = JobProfile::new(
        "abc",
        vec![
            TaskSpec::new(0).with_exec(1, 80.0),
            TaskSpec::new(1).with_exec(1, 77.0),
            TaskSpec::new(2).with_exec(1, 80.0),
        ],
    )
    .unwrap();
    let ranks = compute_rank_u(&job, &resources(&[1]));
    assert_eq!(heft_order(&[key(1), key(2), key(0)], &ranks), vec![key(0), key(2), key(1)]);
    assert_eq!(heft_order(&[key(1)], &ranks), vec![key(1)]);
}

#[test]
fn est_examples() {
    let job: JobProfile = JobProfile::new(
        "pair",
        vec![TaskSpec::new(0).with_exec(1, 20.0), TaskSpec::new(1).with_exec(1, 5.0).with_pred(0, 7.0)],
    )
    .unwrap();
    let empty = vec![PeTimeline::new(); 2];
    let none: HashMap<TaskKey, Placement<f64>> = HashMap::new();
    assert_eq!(est(&job, key(0), 0, &empty, &none, 0.0).unwrap(), 0.0);

    let mut finished = HashMap::new();
    finished.insert(key(0), Placement { pe: 0, start: 0.0, finish: 20.0 });
    let busy = |pe: usize| {
        let mut tl = vec![PeTimeline::new(); 2];
        tl[pe].insert(Interval { start: 0.0, finish: 15.0, owner: TaskKey::new(9, 0) });
        tl
    };
    assert_eq!(est(&job, key(1), 1, &busy(1), &finished, 0.0).unwrap(), 27.0);
    assert_eq!(est(&job, key(1), 0, &busy(0), &finished, 0.0).unwrap(), 20.0);
}

#[test]
fn eft_select_examples() {
    let one: JobProfile = JobProfile::new("one", vec![TaskSpec::new(0).with_exec(1, 10.0)]).unwrap();
    let none: HashMap<TaskKey, Placement<f64>> = HashMap::new();
    let mut tl = vec![PeTimeline::new()];
    let p = eft_select(&one, &resources(&[1]), key(0), &mut tl, &none, 0.0).unwrap();
    assert_eq!((p.pe, p.start, p.finish), (0, 0.0, 10.0));

    let five: JobProfile = JobProfile::new("five", vec![TaskSpec::new(0).with_exec(1, 5.0)]).unwrap();
    let slots = || {
        vec![PeTimeline::from_intervals(vec![
            Interval { start: 0.0, finish: 10.0, owner: TaskKey::new(9, 0) },
            Interval { start: 25.0, finish: 30.0, owner: TaskKey::new(9, 1) },
        ])]
    };
    let mut tl = slots();
    let p = eft_select(&five, &resources(&[1]), key(0), &mut tl, &none, 8.0).unwrap();
    assert_eq!((p.start, p.finish), (10.0, 15.0));
    let mut tl = slots();
    let p = eft_select_append(&five, &resources(&[1]), key(0), &mut tl, &none, 8.0).unwrap();
    assert_eq!(p.start, 30.0);

    // exec {5, 4} with EST {0, 2}
    let two: JobProfile =
        JobProfile::new("two", vec![TaskSpec::new(0).with_exec(1, 5.0).with_exec(2, 4.0)]).unwrap();
    let mut tl = vec![
        PeTimeline::new(),
        PeTimeline::from_intervals(vec![Interval { start: 0.0, finish: 2.0, owner: TaskKey::new(9, 0) }]),
    ];
    let p = eft_select(&two, &resources(&[1, 2]), key(0), &mut tl, &none, 0.0).unwrap();
    assert_eq!((p.pe, p.finish), (0, 5.0));
}

#[test]
fn static_and_oracle_examples() {
    let single: JobProfile =
        JobProfile::new("s", vec![TaskSpec::new(0).with_exec(1, 3.0).with_exec(2, 9.0)]).unwrap();
    let res = resources(&[1, 2]);
    assert_eq!(heft_static_schedule(&single, &res).unwrap().makespan, 3.0);
    assert_eq!(brute_force_optimal(&single, &res, DEFAULT_ORACLE_LIMIT).unwrap(), 3.0);

    let pair: JobProfile =
        JobProfile::new("p", vec![TaskSpec::new(0).with_exec(1, 5.0), TaskSpec::new(1).with_exec(1, 7.0)])
            .unwrap();
    assert_eq!(heft_static_schedule(&pair, &resources(&[1])).unwrap().makespan, 12.0);
    let twins: JobProfile =
        JobProfile::new("t", vec![TaskSpec::new(0).with_exec(1, 5.0), TaskSpec::new(1).with_exec(1, 5.0)])
            .unwrap();
    assert_eq!(brute_force_optimal(&twins, &resources(&[1, 1]), DEFAULT_ORACLE_LIMIT).unwrap(), 5.0);

    let (job, res) = Bundled::Canonical.load::<f64>().unwrap();
    let heft = heft_static_schedule(&job, &res).unwrap();
    assert_eq!(heft.makespan, 80.0);
    assert_eq!(heft.record.len(), 10);
}

fn small_instance(seed: u64) -> (JobProfile, ResourceProfile) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = random_resources(3, 3, &mut rng);
    let job = random_job(&DagSpec::default(), &[1, 2, 3], &mut rng);
    (job, res)
}

/// Same DAG with ids shuffled; `perm[old] = new`.
fn relabel(job: &JobProfile, perm: &[usize]) -> JobProfile {
    let mut tasks: Vec<TaskSpec<f64>> = (0..job.len()).map(TaskSpec::new).collect();
    for t in job.tasks() {
        let nt = &mut tasks[perm[t.id]];
        nt.exec_times = t.exec_times.clone();
        nt.predecessors = t.predecessors.iter().map(|&(p, c)| (perm[p], c)).collect();
        nt.predecessors.sort_by_key(|p| p.0);
    }
    JobProfile::new("relabeled", tasks).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn descending_rank_is_topological(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = DagSpec { tasks: 1..=20, edge_prob: 0.3, ..Default::default() };
        let job: JobProfile = random_job(&spec, &[1, 2, 3], &mut rng);
        let res = random_resources(4, 3, &mut rng);
        let ranks = compute_rank_u(&job, &res);
        for (s, d, _) in job.edges() {
            prop_assert!(ranks.get(s) > ranks.get(d));
        }
        let all: Vec<TaskKey> = (0..job.len()).map(key).collect();
        let order = heft_order(&all, &ranks);
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, k)| (k.task, i)).collect();
        for (s, d, _) in job.edges() {
            prop_assert!(pos[&s] < pos[&d]);
        }
    }

    #[test]
    fn insertion_never_finishes_later_than_append(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let job: JobProfile = random_job(&DagSpec { tasks: 1..=1, ..Default::default() }, &[1, 2], &mut rng);
        let res = random_resources(3, 2, &mut rng);
        let mut timelines = vec![PeTimeline::new(); res.len()];
        for (pe, tl) in timelines.iter_mut().enumerate() {
            let mut t = 0.0;
            for i in 0..rng.random_range(0..5) {
                t += rng.random_range(0.0..15.0);
                let len = rng.random_range(1.0..10.0);
                tl.insert(Interval { start: t, finish: t + len, owner: TaskKey::new(100 + pe as u64, i) });
                t += len;
            }
        }
        let reference = rng.random_range(0.0..30.0);
        let none: HashMap<TaskKey, Placement<f64>> = HashMap::new();
        let a = eft_select(&job, &res, key(0), &mut timelines.clone(), &none, reference).unwrap();
        let b = eft_select_append(&job, &res, key(0), &mut timelines.clone(), &none, reference).unwrap();
        prop_assert!(a.finish <= b.finish);
        prop_assert!(a.start >= reference);
    }

    #[test]
    fn heft_schedules_are_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = DagSpec { tasks: 1..=25, ..Default::default() };
        let res = random_resources(5, 3, &mut rng);
        let job: JobProfile = random_job(&spec, &[1, 2, 3], &mut rng);
        let s = heft_static_schedule(&job, &res).unwrap();
        let opts = VerifyOptions { require_complete_jobs: true, nominal_durations: true };
        let v = verify_schedule(&job, &res, &s.record, opts);
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn rank_is_invariant_under_relabeling(seed in any::<u64>()) {
        let (job, res) = small_instance(seed);
        let mut perm: Vec<usize> = (0..job.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xabcd));
        let moved = relabel(&job, &perm);
        let a = compute_rank_u(&job, &res);
        let b = compute_rank_u(&moved, &res);
        for (t, &moved_id) in perm.iter().enumerate() {
            prop_assert_eq!(a.get(t), b.get(moved_id));
        }
    }

    #[test]
    fn oracle_is_never_worse_than_heft(seed in any::<u64>()) {
        let (job, res) = small_instance(seed);
        let opt = brute_force_optimal(&job, &res, DEFAULT_ORACLE_LIMIT).unwrap();
        let heft = heft_static_schedule(&job, &res).unwrap().makespan;
        prop_assert!(opt <= heft + 1e-9, "opt {} heft {}", opt, heft);
    }
}
