use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{Activation, Dense, Mlp, ParamSet, Tape, Tensor2, Var};
use crate::profile::{JobProfile, ResourceProfile};
use crate::scalar::Scalar;

use super::features::{
    task_feature_width, FeatureScales, GraphEmbedding, GraphLayout, Observation, StateLayout, NODE_FEATURES,
};

/// Model sizes. Hidden sizes apply to every MLP (`f`, `g`, policy, critic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub embed_width: usize,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub critic: bool,
    pub scales: FeatureScales,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            embed_width: 8,
            hidden: vec![32, 32],
            activation: Activation::Tanh,
            critic: false,
            scales: FeatureScales::default(),
        }
    }
}

/// Two-level message passing over job DAGs plus the task-scoring head.
///
/// `e_v = g(Σ_{w ∈ children(v)} f(e_w)) + prep(x_v)`, `y_i = g_job(Σ_v
/// f_job(e_v))`, `z = g_glob(Σ_i f_glob(y_i))`; each ready task is scored
/// from `[φ ‖ e_v ‖ y_i ‖ z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNet {
    pub config: ModelConfig,
    pub layout: GraphLayout,
    pub state_layout: StateLayout,
    pub capacity: usize,
    prep: Dense,
    f_node: Mlp,
    g_node: Mlp,
    f_job: Mlp,
    g_job: Mlp,
    f_glob: Mlp,
    g_glob: Mlp,
    policy: Mlp,
    critic: Option<Mlp>,
}

/// Forward-pass handles on a tape.
#[derive(Debug, Clone, Copy)]
pub struct Forward {
    pub nodes: Var,
    pub jobs: Var,
    pub global: Var,
    /// `1 x ready` logits.
    pub logits: Var,
    pub value: Option<Var>,
}

impl PolicyNet {
    /// Builds the network and a freshly initialized parameter set.
    pub fn new<T: Scalar>(
        config: ModelConfig,
        job: &JobProfile<T>,
        resources: &ResourceProfile,
        capacity: usize,
        seed: u64,
    ) -> (Self, ParamSet<T>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::new(seed);
        let d = config.embed_width;
        let act = config.activation;
        let sizes = |input: usize, out: usize| {
            let mut v = vec![input];
            v.extend(&config.hidden);
            v.push(out);
            v
        };
        let mut mlp = |p: &mut ParamSet<T>, name: &str, input: usize, out: usize, last: Activation| {
            Mlp::new(p, name, &sizes(input, out), act, last, &mut rng)
        };
        let f_node = mlp(&mut params, "f_node", d, d, act);
        let g_node = mlp(&mut params, "g_node", d, d, act);
        let f_job = mlp(&mut params, "f_job", d, d, act);
        let g_job = mlp(&mut params, "g_job", d, d, act);
        let f_glob = mlp(&mut params, "f_glob", d, d, act);
        let g_glob = mlp(&mut params, "g_glob", d, d, act);
        let phi = task_feature_width(resources.len(), capacity);
        let policy = mlp(&mut params, "policy", phi + 3 * d, 1, Activation::Identity);
        let critic = config.critic.then(|| mlp(&mut params, "critic", d, 1, Activation::Identity));
        let prep = Dense::new(&mut params, "prep", NODE_FEATURES, d, Activation::Identity, &mut rng);
        let layout = GraphLayout::new(job, resources);
        let state_layout = StateLayout::new(job.len(), resources.len(), capacity, d);
        (
            Self {
                config,
                layout,
                state_layout,
                capacity,
                prep,
                f_node,
                g_node,
                f_job,
                g_job,
                f_glob,
                g_glob,
                policy,
                critic,
            },
            params,
        )
    }

    pub fn embed_width(&self) -> usize {
        self.config.embed_width
    }

    /// Records the forward pass of `obs` on `tape`.
    pub fn forward<T: Scalar>(
        &self,
        tape: &mut Tape<T>,
        params: &ParamSet<T>,
        obs: &Observation<T>,
    ) -> Forward {
        let d = self.embed_width();
        let n = self.layout.tasks;
        let jobs = obs.jobs;

        let x = tape.constant(obs.nodes.clone());
        let prep = self.prep.forward(tape, params, x);

        // (var, row) of f(e_w) for every node, filled level by level
        let mut f_of: Vec<Option<(Var, usize)>> = vec![None; jobs * n];
        let mut e_of: Vec<Option<(Var, usize)>> = vec![None; jobs * n];
        for level in &self.layout.levels {
            let rows: Vec<usize> =
                (0..jobs).flat_map(|slot| level.iter().map(move |&t| slot * n + t)).collect();
            if rows.is_empty() {
                continue;
            }
            let agg_groups = rows
                .iter()
                .map(|&r| {
                    let slot = r / n;
                    self.layout.children[r % n]
                        .iter()
                        .map(|&c| f_of[slot * n + c].expect("children come first"))
                        .collect()
                })
                .collect();
            let agg = tape.gather(d, agg_groups);
            let g = self.g_node.forward(tape, params, agg);
            let own = tape.gather(d, rows.iter().map(|&r| vec![(prep, r)]).collect());
            let e = tape.add(g, own);
            let f = self.f_node.forward(tape, params, e);
            for (i, &r) in rows.iter().enumerate() {
                e_of[r] = Some((e, i));
                f_of[r] = Some((f, i));
            }
        }
        let nodes = tape.gather(d, e_of.iter().map(|e| vec![e.expect("every node embedded")]).collect());

        let fj = self.f_job.forward(tape, params, nodes);
        let per_job = tape.gather(d, (0..jobs).map(|j| (0..n).map(|t| (fj, j * n + t)).collect()).collect());
        let job_emb = self.g_job.forward(tape, params, per_job);

        let fg = self.f_glob.forward(tape, params, job_emb);
        let all = tape.gather(d, vec![(0..jobs).map(|j| (fg, j)).collect()]);
        let global = self.g_glob.forward(tape, params, all);

        let k = obs.ready.len();
        let phi = tape.constant(obs.task_features.clone());
        let e_r = tape.gather(d, obs.ready_rows.iter().map(|&r| vec![(nodes, r)]).collect());
        let y_r = tape.gather(d, obs.ready_slots.iter().map(|&s| vec![(job_emb, s)]).collect());
        let z_r = tape.gather(d, (0..k).map(|_| vec![(global, 0)]).collect());
        let input = tape.concat_cols(&[phi, e_r, y_r, z_r]);
        let scores = self.policy.forward(tape, params, input);
        let logits = tape.transpose(scores);
        let value = self.critic.as_ref().map(|c| c.forward(tape, params, global));
        Forward { nodes, jobs: job_emb, global, logits, value }
    }

    /// Embeddings of the queued jobs without keeping the tape.
    pub fn embed_jobs<T: Scalar>(&self, params: &ParamSet<T>, obs: &Observation<T>) -> GraphEmbedding<T> {
        let mut tape = Tape::new();
        let f = self.forward(&mut tape, params, obs);
        GraphEmbedding {
            nodes: tape.value(f.nodes).clone(),
            jobs: tape.value(f.jobs).clone(),
            global: tape.value(f.global).clone(),
        }
    }

    /// Ready-task logits in the order of `obs.ready`.
    pub fn logits<T: Scalar>(&self, params: &ParamSet<T>, obs: &Observation<T>) -> Vec<T> {
        let mut tape = Tape::new();
        let f = self.forward(&mut tape, params, obs);
        tape.value(f.logits).as_slice().to_vec()
    }

    /// Flat state vector of `obs`.
    pub fn state<T: Scalar>(&self, params: &ParamSet<T>, obs: &Observation<T>) -> Vec<T> {
        let emb = self.embed_jobs(params, obs);
        super::features::build_state(&self.state_layout, &emb, &obs.task_features)
    }

    /// Critic estimate, when the critic head is enabled.
    pub fn value<T: Scalar>(&self, params: &ParamSet<T>, obs: &Observation<T>) -> Option<T> {
        let mut tape = Tape::new();
        let f = self.forward(&mut tape, params, obs);
        f.value.map(|v| tape.scalar(v))
    }
}

/// Rows of a tensor as vectors; handy in tests and exports.
pub fn rows_of<T: Scalar>(t: &Tensor2<T>) -> Vec<Vec<T>> {
    (0..t.rows()).map(|r| t.row(r).to_vec()).collect()
}
