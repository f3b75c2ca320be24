//! Learned task ordering: graph embeddings of the queued jobs, a
//! Plackett-Luce policy over the ready set, truncated differential rewards
//! and a curriculum-driven policy-gradient trainer.

mod features;
mod model;
mod policy;
mod reward;
mod rollout;
mod train;

pub use features::{
    build_state, node_features, observe, task_feature_width, FeatureScales, GraphEmbedding, GraphLayout,
    Observation, StateLayout, NODE_FEATURES,
};
pub use model::{rows_of, Forward, ModelConfig, PolicyNet};
pub use policy::{ordering_log_prob, select_ordering, sum_scalars, SelectMode, Selection};
pub use reward::{compute_reward, returns, rollout_mean_advantages, truncate_rewards, JobSpan, StepTiming};
pub use rollout::{job_spans, run_rollout, NeuralOrderer, Trajectory, Transition};
pub use train::{
    advantages, derive_seed, init_training, policy_update, read_checkpoint_config, surrogate_loss,
    train_curriculum, BaselineKind, CheckpointError, EpisodeLog, PolicyTerm, Stage, TrainConfig, TrainState,
    UpdateStats, CHECKPOINT_FORMAT,
};
