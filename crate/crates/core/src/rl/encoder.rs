//! Encoder agent: places one Clifford gate per step until the logical basis
//! satisfies the Knill-Laflamme conditions for the error set.

use std::fmt;

use rand::RngCore;

use super::{one_hot_into, Env, Step};
use crate::codes::{check_kl_states, KlMode, KlReport};
use crate::error::{Error, Result};
use crate::gates::{encode_tensor, gcd, tensor_planes, Circuit, GateKind};
use crate::pauli::PauliWord;
use crate::state::QuditState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderAction {
    /// Leave position `t` empty.
    Noop,
    H(usize),
    S(u32, usize),
    Cx(usize, usize),
}

impl fmt::Display for EncoderAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderAction::Noop => write!(f, "I"),
            EncoderAction::H(q) => write!(f, "H {q}"),
            EncoderAction::S(p, q) => write!(f, "S{p} {q}"),
            EncoderAction::Cx(c, t) => write!(f, "CX {c} {t}"),
        }
    }
}

/// No-op, then H on each qudit, S_q on each qudit for every valid `q >= 2`,
/// then CNOT on every ordered pair.
pub fn encoder_actions(d: u32, n: usize) -> Vec<EncoderAction> {
    let mut out = vec![EncoderAction::Noop];
    out.extend((0..n).map(EncoderAction::H));
    for p in (2..d).filter(|&p| gcd(p, d) == 1) {
        out.extend((0..n).map(|q| EncoderAction::S(p, q)));
    }
    for c in 0..n {
        for t in 0..n {
            if c != t {
                out.push(EncoderAction::Cx(c, t));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EncoderReward {
    /// `gamma_t * (-violations / total) + r_success * [all satisfied]`,
    /// with `gamma_t = t / t_steps`.
    Kl { r_success: f64 },
    /// Exploration shaping: a base cost per step, a bonus for CNOTs, a penalty
    /// for repeating the previous action, and terminal success/failure values.
    Shaped { r_base: f64, r_penalty: f64, r_boost: f64, r_success: f64, r_failure: f64 },
}

impl EncoderReward {
    pub fn shaped() -> Self {
        EncoderReward::Shaped { r_base: -0.01, r_penalty: -0.05, r_boost: 0.02, r_success: 10.0, r_failure: -1.0 }
    }
}

impl Default for EncoderReward {
    fn default() -> Self {
        EncoderReward::Kl { r_success: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderEnv {
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub errors: Vec<PauliWord>,
    pub mode: KlMode,
    pub t_steps: usize,
    pub reward: EncoderReward,
    actions: Vec<EncoderAction>,
    planes: usize,
    circuit: Circuit,
    basis: Vec<QuditState>,
    t: usize,
    last: Option<usize>,
    report: Option<KlReport>,
}

impl EncoderEnv {
    pub fn new(d: u32, n: usize, k: usize, errors: Vec<PauliWord>, mode: KlMode, t_steps: usize, reward: EncoderReward) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::Invalid(format!("need 0 <= k <= n and n > 0, got k = {k}, n = {n}")));
        }
        if t_steps == 0 {
            return Err(Error::Invalid("encoder episodes need at least one step".into()));
        }
        for e in &errors {
            if e.d != d || e.n() != n {
                return Err(Error::Dimension { expected: n, got: e.n() });
            }
        }
        let mut env = Self {
            d,
            n,
            k,
            errors,
            mode,
            t_steps,
            reward,
            actions: encoder_actions(d, n),
            planes: tensor_planes(d).len(),
            circuit: Circuit::new(d, n),
            basis: Vec::new(),
            t: 0,
            last: None,
            report: None,
        };
        env.clear()?;
        Ok(env)
    }

    fn clear(&mut self) -> Result<()> {
        self.circuit = Circuit::new(self.d, self.n);
        let stride = (self.d as usize).pow((self.n - self.k) as u32);
        self.basis = (0..(self.d as usize).pow(self.k as u32))
            .map(|j| QuditState::basis(self.d, self.n, j * stride))
            .collect::<Result<_>>()?;
        self.t = 0;
        self.last = None;
        self.report = None;
        Ok(())
    }

    pub fn actions(&self) -> &[EncoderAction] {
        &self.actions
    }

    pub fn set_errors(&mut self, errors: Vec<PauliWord>) {
        self.errors = errors;
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn codewords(&self) -> &[QuditState] {
        &self.basis
    }

    pub fn last_report(&self) -> Option<&KlReport> {
        self.report.as_ref()
    }

    fn observe(&self) -> Result<Vec<f64>> {
        let mut obs = encode_tensor(&self.circuit, self.t_steps)?.as_f64();
        let mut clock = vec![0.0; self.t_steps];
        if self.t < self.t_steps {
            one_hot_into(&mut clock, self.t);
        }
        obs.extend(clock);
        Ok(obs)
    }
}

impl Env for EncoderEnv {
    fn obs_dim(&self) -> usize {
        self.planes * self.n * self.t_steps + self.t_steps
    }

    fn n_actions(&self) -> usize {
        self.actions.len()
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.clear()?;
        self.observe()
    }

    fn step(&mut self, action: usize) -> Result<Step> {
        if self.t >= self.t_steps || self.report.as_ref().is_some_and(|r| r.all_satisfied()) {
            return Err(Error::Invalid("encoder episode already finished".into()));
        }
        let a = *self.actions.get(action).ok_or_else(|| Error::Invalid(format!("encoder action {action} out of range")))?;
        let placed = match a {
            EncoderAction::Noop => None,
            EncoderAction::H(q) => Some((GateKind::H, vec![q])),
            EncoderAction::S(p, q) => Some((GateKind::S(p), vec![q])),
            EncoderAction::Cx(c, t) => Some((GateKind::Cnot, vec![c, t])),
        };
        if let Some((kind, qs)) = placed {
            self.circuit.push_at(self.t, kind.clone(), &qs)?;
            let mut g = Circuit::new(self.d, self.n);
            g.push(kind, &qs)?;
            self.basis = self.basis.iter().map(|s| g.apply(s)).collect::<Result<_>>()?;
        }
        self.t += 1;
        let report = check_kl_states(&self.basis, &self.errors, self.mode)?;
        let ok = report.all_satisfied();
        let frac = if report.total() == 0 { 0.0 } else { report.violations() as f64 / report.total() as f64 };
        let done = ok || self.t == self.t_steps;
        let reward = match self.reward {
            EncoderReward::Kl { r_success } => {
                let gamma = self.t as f64 / self.t_steps as f64;
                -gamma * frac + if ok { r_success } else { 0.0 }
            }
            EncoderReward::Shaped { r_base, r_penalty, r_boost, r_success, r_failure } => {
                if ok {
                    r_success
                } else if done {
                    r_failure
                } else {
                    let mut r = r_base;
                    if matches!(a, EncoderAction::Cx(..)) {
                        r += r_boost;
                    }
                    if self.last == Some(action) {
                        r += r_penalty;
                    }
                    r
                }
            }
        };
        self.last = Some(action);
        self.report = Some(report);
        Ok(Step { obs: self.observe()?, reward, done })
    }

    fn solved(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.all_satisfied())
    }

    fn depth(&self) -> usize {
        self.circuit.depth()
    }
}
