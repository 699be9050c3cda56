//! Recovery agent: one single-step sub-policy per syndrome, rewarded with the
//! fidelity of the corrected state.

use rand::{Rng, RngCore};

use super::{one_hot_into, Env, Step};
use crate::codes::{single_qudit_paulis, Syndrome};
use crate::error::{Error, Result};
use crate::gates::Circuit;
use crate::pauli::{syndrome_of, PauliWord, StabilizerSet};
use crate::state::QuditState;

/// Corrections on offer: identity, then every single-qudit Pauli, qudit-major.
pub fn recovery_actions(d: u32, n: usize) -> Vec<PauliWord> {
    let mut out = vec![PauliWord::identity(d, n)];
    out.extend(single_qudit_paulis(d, n));
    out
}

/// Logical state used to score a correction.
#[derive(Debug, Clone, PartialEq)]
pub enum TestState {
    /// Haar-random logical state, redrawn every episode.
    Random,
    Fixed(QuditState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryEnv {
    pub d: u32,
    pub n: usize,
    pub k: usize,
    encoder: Circuit,
    stabilizers: StabilizerSet,
    syndrome: Syndrome,
    errors: Vec<PauliWord>,
    actions: Vec<PauliWord>,
    pub test_state: TestState,
    episode: Option<(PauliWord, QuditState)>,
    last_fidelity: Option<f64>,
}

/// Fidelity above which a correction counts as exact.
const SUCCESS: f64 = 1.0 - 1e-9;

impl RecoveryEnv {
    /// Sub-environment for `syndrome`: episodes draw from the errors in
    /// `errors` that produce it.
    pub fn new(encoder: Circuit, k: usize, stabilizers: StabilizerSet, syndrome: Syndrome, errors: &[PauliWord]) -> Result<Self> {
        let (d, n) = (encoder.d, encoder.n);
        let mut matching = Vec::new();
        for e in errors {
            if Syndrome(syndrome_of(e, &stabilizers)?) == syndrome {
                matching.push(e.clone());
            }
        }
        if matching.is_empty() {
            return Err(Error::MissingRecovery(syndrome.0.clone()));
        }
        Ok(Self {
            d,
            n,
            k,
            encoder,
            stabilizers,
            syndrome,
            errors: matching,
            actions: recovery_actions(d, n),
            test_state: TestState::Random,
            episode: None,
            last_fidelity: None,
        })
    }

    pub fn syndrome(&self) -> &Syndrome {
        &self.syndrome
    }

    pub fn errors(&self) -> &[PauliWord] {
        &self.errors
    }

    pub fn actions(&self) -> &[PauliWord] {
        &self.actions
    }

    pub fn last_fidelity(&self) -> Option<f64> {
        self.last_fidelity
    }

    fn encode(&self, logical: &QuditState) -> Result<QuditState> {
        let pad = QuditState::basis(self.d, self.n - self.k, 0)?;
        self.encoder.apply(&logical.tensor(&pad)?)
    }

    /// Fidelity after `error` and then correction `action` on `logical`.
    pub fn evaluate(&self, action: usize, error: &PauliWord, logical: &QuditState) -> Result<f64> {
        let fix = self.actions.get(action).ok_or_else(|| Error::Invalid(format!("recovery action {action} out of range")))?;
        let clean = self.encode(logical)?;
        let fixed = fix.apply(&error.apply(&clean)?)?;
        Ok(clean.inner(&fixed).norm_sqr())
    }

    /// Whether `action` restores every error of this syndrome exactly.
    pub fn corrects_all(&self, action: usize) -> Result<bool> {
        let fix = self.actions.get(action).ok_or_else(|| Error::Invalid(format!("recovery action {action} out of range")))?;
        for e in &self.errors {
            if !self.stabilizers.contains(&fix.mul(e)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn observe(&self) -> Vec<f64> {
        let d = self.d as usize;
        let mut obs = vec![0.0; self.syndrome.0.len() * d];
        for (i, &s) in self.syndrome.0.iter().enumerate() {
            one_hot_into(&mut obs[i * d..], s as usize);
        }
        obs
    }
}

impl Env for RecoveryEnv {
    fn obs_dim(&self) -> usize {
        self.syndrome.0.len() * self.d as usize
    }

    fn n_actions(&self) -> usize {
        self.actions.len()
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let e = self.errors[rng.gen_range(0..self.errors.len())].clone();
        let state = match &self.test_state {
            TestState::Random => QuditState::random(self.d, self.k, rng)?,
            TestState::Fixed(s) => s.clone(),
        };
        self.episode = Some((e, state));
        self.last_fidelity = None;
        Ok(self.observe())
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        let (e, state) = self.episode.take().ok_or_else(|| Error::Invalid("recovery episode not started".into()))?;
        let f = self.evaluate(action, &e, &state)?;
        self.last_fidelity = Some(f);
        Ok(Step { obs: self.observe(), reward: f, done: true })
    }

    fn solved(&self) -> bool {
        self.last_fidelity.is_some_and(|f| f >= SUCCESS)
    }
}
