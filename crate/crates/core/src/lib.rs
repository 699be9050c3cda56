//! Qudit stabilizer codes: exact simulation, reinforcement-learning discovery
//! and bandit-driven variational adaptation to drifting noise.

pub mod error;
pub mod experiment;
pub mod brave;
pub mod codes;
pub mod config;
pub mod gates;
pub mod noise;
pub mod optim;
pub mod pauli;
pub mod registry;
pub mod rl;
pub mod regret;
pub mod state;

pub use brave::{AdaptiveConfig, AdaptiveRun, FidelityMode, LogicalInput, VariationalCode};
pub use codes::{CodeSpec, KlMode, KlReport, Syndrome};
pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use gates::Circuit;
pub use noise::AlphaChannel;
pub use pauli::{in_group, syndrome_of, PauliWord, StabilizerSet};
pub use state::{
    apply_channel, apply_unitary, fidelity, sample_trajectory, CMatrix, CVector, DensityOp, KrausChannel,
    QuditState, UnitaryOp, C64,
};
