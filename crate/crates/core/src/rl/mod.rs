//! Learning environments for code discovery and a small policy-gradient
//! learner.
//!
//! Three agents are trained in sequence: an encoder agent that places
//! Clifford gates until the Knill-Laflamme conditions hold, a syndrome agent
//! that picks one stabilizer per ancilla, and a recovery agent with one
//! sub-policy per syndrome. Sub-policies are composed with [`MixMatch`].

mod curriculum;
mod encoder;
mod pipeline;
mod policy;
mod recovery;
mod syndrome;

pub use curriculum::CurriculumPlan;
pub use encoder::{encoder_actions, EncoderAction, EncoderEnv, EncoderReward};
pub use pipeline::{
    error_set, run_pipeline, run_stage, DiscoveryConfig, PipelineResult, Stage, StageLog, SyndromeMode,
};
pub use policy::{
    greedy_rollout, mixmatch_compose, train_policy, Activation, Context, EpisodeLog, MixMatch, Policy, PolicyConfig, Reinforce,
    TrainConfig, TrainLog,
};
pub use recovery::{recovery_actions, RecoveryEnv, TestState};
pub use syndrome::{check_candidate, syndrome_actions, CandidateCheck, ElementarySyndromeEnv, SyndromeEnv};

use rand::RngCore;

use crate::error::Result;

/// Outcome of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// Episodic environment with a fixed discrete action space.
pub trait Env {
    fn obs_dim(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn reset(&mut self, rng: &mut dyn RngCore) -> Result<Vec<f64>>;
    fn step(&mut self, action: usize) -> Result<Step>;
    /// Whether the last finished episode solved the task.
    fn solved(&self) -> bool;
    /// Circuit depth reached so far, for learning-curve logs.
    fn depth(&self) -> usize {
        0
    }
}

pub(crate) fn one_hot_into(out: &mut [f64], index: usize) {
    out[index] = 1.0;
}
