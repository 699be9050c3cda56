//! Bandit-driven recalibration of a code under drifting noise.
//!
//! A single-qudit variational unitary `u(theta)` is applied to every physical
//! qudit after encoding, and the stabilizers and recoveries are conjugated
//! with it. Fidelities are evaluated in the base frame, where the channel seen
//! by the code is `u^dag E_k u` on every qudit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::codes::{measure_syndrome, syndrome_projection, CodeSpec, Syndrome};
use crate::error::{Error, Result};
use crate::gates::{su_d_unitary, VariationalParams};
use crate::noise::AlphaChannel;
use crate::optim::NelderMead;
use crate::state::{apply_local, c, sample_trajectory, CMatrix, CVector, KrausChannel, QuditState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalInput {
    /// `|0_L>`.
    Zero,
    /// Uniform superposition of the logical basis.
    Plus,
}

impl LogicalInput {
    pub fn state(&self, d: u32, k: usize) -> Result<QuditState> {
        match self {
            LogicalInput::Zero => QuditState::basis(d, k, 0),
            LogicalInput::Plus => {
                let dim = (d as usize).pow(k as u32);
                QuditState::new(d, k, CVector::from_element(dim, c(1.0 / (dim as f64).sqrt(), 0.0)))
            }
        }
    }
}

impl FromStr for LogicalInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(LogicalInput::Zero),
            "plus" => Ok(LogicalInput::Plus),
            other => Err(Error::Parse(format!("unknown logical input '{other}' (zero | plus)"))),
        }
    }
}

impl fmt::Display for LogicalInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicalInput::Zero => "zero",
            LogicalInput::Plus => "plus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMode {
    /// Average over every Kraus branch and syndrome outcome.
    Exact,
    /// Mean over sampled noise trajectories and measurement outcomes.
    Sampled { shots: usize },
}

/// A base code with a variational frame.
#[derive(Debug, Clone)]
pub struct VariationalCode {
    pub base: CodeSpec,
    pub theta: VariationalParams,
    target: QuditState,
    /// `P_s R_s^dag |t>` for every syndrome with a recovery.
    witnesses: Vec<CVector>,
}

impl VariationalCode {
    pub fn new(base: CodeSpec, logical_in: &QuditState) -> Result<Self> {
        let target = base.encode(logical_in)?;
        let mut witnesses = vec![target.amps.clone()];
        for (s, r) in &base.syndrome_table {
            let moved = r.adjoint().apply(&target)?;
            let w = syndrome_projection(&base, &moved.amps, s);
            if w.norm() > 1e-12 {
                witnesses.push(w);
            }
        }
        let theta = VariationalParams::zeros(base.d);
        Ok(Self { base, theta, target, witnesses })
    }

    pub fn with_theta(mut self, theta: VariationalParams) -> Result<Self> {
        VariationalParams::new(self.base.d, theta.theta.clone())?;
        self.theta = theta;
        Ok(self)
    }

    pub fn target(&self) -> &QuditState {
        &self.target
    }

    pub fn frame(&self) -> Result<CMatrix> {
        Ok(su_d_unitary(&self.theta.theta, self.base.d)?.mat)
    }

    /// Derived stabilizers `U S U^dag` with `U = u^{(x) n}`, as dense matrices.
    pub fn derived_stabilizers(&self) -> Result<Vec<CMatrix>> {
        let u = self.frame()?;
        let mut big = CMatrix::identity(1, 1);
        for _ in 0..self.base.n {
            big = big.kronecker(&u);
        }
        Ok(self.base.stabilizers.generators.iter().map(|s| &big * s.dense() * big.adjoint()).collect())
    }

    /// Single-qudit Kraus operators in the base frame, `u^dag E u`.
    pub fn base_frame_channel(&self, ch: &KrausChannel) -> Result<KrausChannel> {
        let u = self.frame()?;
        if ch.dim() != u.nrows() {
            return Err(Error::Dimension { expected: u.nrows(), got: ch.dim() });
        }
        Ok(KrausChannel { ops: ch.ops.iter().map(|e| u.adjoint() * e * &u).collect() })
    }

    fn exact(&self, local: &KrausChannel) -> Result<f64> {
        let (d, n) = (self.base.d, self.base.n);
        let mut branches = vec![self.target.amps.clone()];
        for q in 0..n {
            let mut next = Vec::with_capacity(branches.len() * local.ops.len());
            for v in &branches {
                for k in &local.ops {
                    next.push(apply_local(v, d, n, k, &[q])?);
                }
            }
            branches = next;
        }
        let mut f = 0.0;
        for v in &branches {
            for w in &self.witnesses {
                f += w.dotc(v).norm_sqr();
            }
        }
        Ok(f)
    }

    fn sampled<R: Rng + ?Sized>(&self, local: &KrausChannel, shots: usize, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::Invalid("sampled fidelity needs at least one shot".into()));
        }
        let mut total = 0.0;
        for _ in 0..shots {
            let mut state = self.target.clone();
            for q in 0..self.base.n {
                state = sample_trajectory(&state, local, &[q], rng)?.0;
            }
            let (s, post) = measure_syndrome(&state, &self.base, rng)?;
            let fixed = match self.base.syndrome_table.get(&s) {
                Some(r) => r.apply(&post)?,
                None => post,
            };
            total += self.target.inner(&fixed).norm_sqr();
        }
        Ok(total / shots as f64)
    }

    /// Fidelity of one correction cycle under the single-qudit channel `ch`
    /// acting independently on every qudit.
    pub fn cycle_fidelity<R: Rng + ?Sized>(&self, ch: &KrausChannel, mode: FidelityMode, rng: &mut R) -> Result<f64> {
        let local = self.base_frame_channel(ch)?;
        match mode {
            FidelityMode::Exact => self.exact(&local),
            FidelityMode::Sampled { shots } => self.sampled(&local, shots, rng),
        }
    }

    /// Syndrome of `U E U^dag` under the derived stabilizers, read from the
    /// dense operators; equals the base syndrome of `E`.
    pub fn derived_syndrome(&self, error: &crate::pauli::PauliWord) -> Result<Syndrome> {
        let u = self.frame()?;
        let mut big = CMatrix::identity(1, 1);
        for _ in 0..self.base.n {
            big = big.kronecker(&u);
        }
        let e = &big * error.dense() * big.adjoint();
        let d = self.base.d;
        let mut out = Vec::new();
        for s in self.derived_stabilizers()? {
            let lhs = &s * &e;
            let rhs = &e * &s;
            let r = (0..d)
                .find(|&r| crate::state::max_abs(&(&lhs - &rhs * crate::state::root_of_unity(r as i64, d))) < 1e-9)
                .ok_or(Error::NonCommuting(crate::state::max_abs(&(lhs - rhs))))?;
            out.push(r);
        }
        Ok(Syndrome(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Keep,
    Retrain,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Keep => "keep",
            Action::Retrain => "retrain",
        })
    }
}

/// Two-armed gradient bandit over (keep, retrain).
#[derive(Debug, Clone, PartialEq)]
pub struct BanditState {
    pub prefs: [f64; 2],
    pub initial: [f64; 2],
    pub baseline: f64,
    pub eta: f64,
}

impl BanditState {
    pub fn new(initial: [f64; 2], baseline: f64, eta: f64) -> Self {
        Self { prefs: initial, initial, baseline, eta }
    }

    pub fn probs(&self) -> [f64; 2] {
        let m = self.prefs[0].max(self.prefs[1]);
        let e = [(self.prefs[0] - m).exp(), (self.prefs[1] - m).exp()];
        let z = e[0] + e[1];
        [e[0] / z, e[1] / z]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        if rng.gen::<f64>() < self.probs()[0] {
            Action::Keep
        } else {
            Action::Retrain
        }
    }

    /// Preference update of the keep/retrain bandit: both arms move with the
    /// advantage `F - baseline`, whichever action was taken.
    pub fn update(&mut self, fidelity: f64) {
        let pi = self.probs();
        let adv = self.eta * (fidelity - self.baseline);
        self.prefs[0] += adv * (1.0 - pi[0]);
        self.prefs[1] -= adv * pi[1];
    }

    pub fn reset(&mut self) {
        self.prefs = self.initial;
    }
}

impl Default for BanditState {
    fn default() -> Self {
        Self::new([0.0, 0.0], 0.99, 0.1)
    }
}

/// Samples an action, then updates the preferences with `fidelity`.
pub fn bandit_step<R: Rng + ?Sized>(b: &BanditState, fidelity: f64, rng: &mut R) -> (Action, BanditState) {
    let action = b.sample(rng);
    let mut next = b.clone();
    next.update(fidelity);
    (action, next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrainOutcome {
    pub theta: VariationalParams,
    pub fidelity: f64,
    pub evals: usize,
    pub exhausted: bool,
}

/// Maximizes the cycle fidelity over the unmasked angles, warm-started at the
/// current angles.
pub fn retrain<R: Rng + ?Sized>(
    vc: &VariationalCode,
    ch: &KrausChannel,
    optimizer: &NelderMead,
    mode: FidelityMode,
    mask: Option<&[bool]>,
    rng: &mut R,
) -> Result<RetrainOutcome> {
    let full = vc.theta.theta.clone();
    let free: Vec<usize> = (0..full.len()).filter(|&i| mask.is_none_or(|m| m.get(i).copied().unwrap_or(false))).collect();
    let x0: Vec<f64> = free.iter().map(|&i| full[i]).collect();
    let mut probe = vc.clone();
    let mut err = None;
    let result = optimizer.minimize(
        |x| {
            let mut th = full.clone();
            for (&i, v) in free.iter().zip(x) {
                th[i] = *v;
            }
            probe.theta = VariationalParams { theta: th };
            match probe.cycle_fidelity(ch, mode, rng) {
                Ok(f) => -f,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::INFINITY
                }
            }
        },
        &x0,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let mut theta = full;
    for (&i, v) in free.iter().zip(&result.x) {
        theta[i] = *v;
    }
    Ok(RetrainOutcome { theta: VariationalParams { theta }, fidelity: -result.value, evals: result.evals, exhausted: result.exhausted })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveConfig {
    /// Grid points per unit time; the run covers `t = i / fs`, `i < fs`.
    pub fs: usize,
    pub bandit: BanditState,
    pub optimizer: NelderMead,
    pub mode: FidelityMode,
    pub logical_in: LogicalInput,
    /// Which generator angles the optimizer may move; all when `None`.
    pub mask: Option<Vec<bool>>,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            fs: 600,
            bandit: BanditState::default(),
            optimizer: NelderMead::default(),
            mode: FidelityMode::Exact,
            logical_in: LogicalInput::Plus,
            mask: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub alpha: f64,
    pub action: Action,
    pub fidelity: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveRun {
    pub records: Vec<StepRecord>,
    pub retrains: usize,
}

impl AdaptiveRun {
    pub fn mean_fidelity(&self) -> f64 {
        self.records.iter().map(|r| r.fidelity).sum::<f64>() / self.records.len().max(1) as f64
    }

    /// `1 - mean(F_t)`.
    pub fn logical_error_rate(&self) -> f64 {
        1.0 - self.mean_fidelity()
    }

    pub fn fraction_above(&self, threshold: f64) -> f64 {
        self.records.iter().filter(|r| r.fidelity >= threshold).count() as f64 / self.records.len().max(1) as f64
    }
}

fn run<R: Rng + ?Sized>(code: &CodeSpec, channel: &AlphaChannel, cfg: &AdaptiveConfig, adaptive: bool, rng: &mut R) -> Result<AdaptiveRun> {
    if cfg.fs == 0 {
        return Err(Error::Invalid("sampling rate must be at least 1".into()));
    }
    if channel.d != code.d {
        return Err(Error::Dimension { expected: code.d as usize, got: channel.d as usize });
    }
    let logical = cfg.logical_in.state(code.d, code.k)?;
    let mut vc = VariationalCode::new(code.clone(), &logical)?;
    let mut bandit = cfg.bandit.clone();
    bandit.reset();
    let mut records = Vec::with_capacity(cfg.fs);
    let mut retrains = 0;
    for i in 0..cfg.fs {
        let t = i as f64 / cfg.fs as f64;
        let alpha = channel.alpha(t);
        let kraus = channel.kraus_at_alpha(alpha);
        let mut action = Action::Keep;
        if adaptive {
            action = bandit.sample(rng);
            if i == 0 || action == Action::Retrain {
                action = Action::Retrain;
                bandit.reset();
                let out = retrain(&vc, &kraus, &cfg.optimizer, cfg.mode, cfg.mask.as_deref(), rng)?;
                vc.theta = out.theta;
                retrains += 1;
            }
        }
        let fidelity = vc.cycle_fidelity(&kraus, cfg.mode, rng)?;
        if adaptive {
            bandit.update(fidelity);
        }
        records.push(StepRecord { t, alpha, action, fidelity, theta: vc.theta.theta.clone() });
    }
    Ok(AdaptiveRun { records, retrains })
}

pub fn brave_run<R: Rng + ?Sized>(code: &CodeSpec, channel: &AlphaChannel, cfg: &AdaptiveConfig, rng: &mut R) -> Result<AdaptiveRun> {
    run(code, channel, cfg, true, rng)
}

/// Same grid with the frame frozen at `theta = 0`.
pub fn static_run<R: Rng + ?Sized>(code: &CodeSpec, channel: &AlphaChannel, cfg: &AdaptiveConfig, rng: &mut R) -> Result<AdaptiveRun> {
    run(code, channel, cfg, false, rng)
}
