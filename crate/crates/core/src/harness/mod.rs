//! Experiment plumbing: configuration files, scheduler construction,
//! parallel run grids, training drivers and artifact writers.

mod artifacts;
mod config;
mod run;
mod training;

use thiserror::Error;

use crate::engine::SimError;
use crate::neural::CheckpointError;
use crate::profile::ProfileError;

pub use artifacts::{gantt_json, write_gantt, write_json, RunArtifacts};
pub use config::{load_profiles, ExperimentConfig, SchedulerKind};
pub use run::{
    load_model, make_orderer, run_grid, run_single, summarize, EvalReport, EvalRow, Model, RunSpec, Summary,
};
pub use training::{train, TrainOutcome, TRAINING_CSV_HEADER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] CheckpointError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit code: 1 for bad input, 2 for a violated runtime contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Sim(SimError::ContractViolation(_) | SimError::Schedule(_)) => 2,
            HarnessError::Sim(SimError::UnsupportedPlacement { .. }) => 2,
            _ => 1,
        }
    }
}
