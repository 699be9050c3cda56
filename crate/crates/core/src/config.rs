//! Flat `key = value` experiment configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Parsing
//! reports every problem in the file at once. [`ExperimentConfig::serialize`]
//! writes every key in [`KEYS`] order, so `parse(serialize(c)) == c`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::brave::{FidelityMode, LogicalInput};
use crate::codes::KlMode;
use crate::error::{Error, Result};
use crate::rl::{Stage, SyndromeMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Discover,
    Adapt,
    Regret,
    Sweep,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verify" => Ok(Mode::Verify),
            "discover" => Ok(Mode::Discover),
            "adapt" => Ok(Mode::Adapt),
            "regret" => Ok(Mode::Regret),
            "sweep" => Ok(Mode::Sweep),
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Verify => "verify",
            Mode::Discover => "discover",
            Mode::Adapt => "adapt",
            Mode::Regret => "regret",
            Mode::Sweep => "sweep",
        })
    }
}

/// Which frame policy an `adapt` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Brave,
    /// Frame frozen at `theta = 0`.
    Static,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brave" => Ok(Strategy::Brave),
            "static" => Ok(Strategy::Static),
            other => Err(Error::Invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Brave => "brave",
            Strategy::Static => "static",
        })
    }
}

/// Encoder reward family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardKind {
    Kl,
    Shaped,
}

/// Every recognised key with a one-line description, in serialization order.
pub const KEYS: &[(&str, &str)] = &[
    ("mode", "verify | discover | adapt | regret | sweep (required)"),
    ("seed", "base seed of the ChaCha8Rng stream (default 0)"),
    ("code", "registry code name; required for verify, base code for discover stages syndrome/recovery"),
    ("d", "qudit dimension, 2 or 3 (default 2)"),
    ("p", "total error probability per qudit, in [0, 1) (default 0.1)"),
    ("p1", "qutrit branch probability of X-type errors; default p/2"),
    ("p2", "qutrit branch probability of X^2-type errors; default p/2"),
    ("tau", "noise period, > 0 (default 0.3)"),
    ("fs", "sampling points per unit time, >= 1 (default 600)"),
    ("strategy", "adapt only: brave | static (default brave)"),
    ("eta", "bandit learning rate, > 0 (default 0.1); also the regret learning rate"),
    ("baseline", "bandit reward baseline in [0, 1] (default 0.99)"),
    ("pref_keep", "initial preference of the keep action (default 0)"),
    ("pref_retrain", "initial preference of the retrain action (default 0)"),
    ("nm_budget", "Nelder-Mead evaluations per retrain, >= 1 (default 200)"),
    ("nm_step", "Nelder-Mead initial simplex offset, > 0 (default 0.25)"),
    ("fidelity", "exact | sampled:<shots> (default exact)"),
    ("logical_in", "zero | plus | auto; auto is plus for qubits and zero for qutrits (default auto)"),
    ("mask", "comma list of 0/1 per generator angle, or all (default all)"),
    ("name", "discover: name of the learned code (default learned)"),
    ("n", "discover: number of qudits (default 3)"),
    ("k", "discover: number of logical qudits (default 1)"),
    ("errors", "discover: error set, terms x z y single erasure:<q> words:<w1>;<w2> none joined by + (default x)"),
    ("kl_mode", "discover: strict | degenerate | detection (default strict)"),
    ("stage", "discover: encoder | syndrome | recovery | pipeline (default pipeline)"),
    ("t_steps", "discover: encoder episode length, >= 1 (default 6)"),
    ("reward", "discover: encoder reward kl | shaped (default kl)"),
    ("r_success", "discover: encoder success reward, > 0 (default 10)"),
    ("syndrome_mode", "discover: modular | elementary (default modular)"),
    ("learner", "discover: reinforce, the only learner; reserved for a clipped-surrogate variant"),
    ("hidden", "discover: policy hidden width, >= 1 (default 64)"),
    ("lr", "discover: Adam learning rate, > 0 (default 0.003)"),
    ("max_episodes", "discover: episode budget per policy (default 20000)"),
    ("max_steps", "discover: environment step budget per stage (default 200000)"),
    ("baseline_decay", "discover: moving-average decay of the reward baseline, in [0, 1) (default 0.9)"),
    ("eval_every", "discover: greedy evaluation period in episodes, 0 disables early stop (default 25)"),
    ("curriculum", "discover: comma list of nested error-set prefix sizes, empty for none (default empty)"),
    ("curriculum_threshold", "discover: success rate that advances the curriculum, in (0, 1] (default 0.9)"),
    ("curriculum_window", "discover: episodes in the success-rate window, >= 1 (default 100)"),
    ("nu", "regret: noise angular frequency, >= 0 (default 0)"),
    ("horizon", "regret: simulated time T, > 0 (default 100)"),
    ("grid", "regret: output grid points, >= 1 (default 1000)"),
    ("g0", "regret: initial instantaneous regret, >= 0 (default 1)"),
    ("sweep_d", "sweep: comma list of dimensions (default 2,3)"),
    ("sweep_p", "sweep: comma list of error probabilities"),
    ("sweep_tau", "sweep: comma list of noise periods"),
    ("sweep_fs", "sweep: comma list of sampling rates used for every dimension"),
    ("sweep_fs_qubit", "sweep: comma list of extra sampling rates used for qubits only"),
    ("repetitions", "sweep: seeds per grid point, >= 1 (default 5)"),
    ("code_qubit", "sweep: qubit code (default bit-flip)"),
    ("code_qutrit", "sweep: qutrit code (default qutrit-shift)"),
];

/// Parsed experiment description. Every field has a default except `mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub seed: u64,
    pub code: Option<String>,
    pub d: u32,
    pub p: f64,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub tau: f64,
    pub fs: usize,
    pub strategy: Strategy,
    pub eta: f64,
    pub baseline: f64,
    pub prefs: [f64; 2],
    pub nm_budget: usize,
    pub nm_step: f64,
    pub fidelity: FidelityMode,
    /// `None` picks plus for qubits and zero for qutrits.
    pub logical_in: Option<LogicalInput>,
    pub mask: Option<Vec<bool>>,
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub errors: String,
    pub kl_mode: KlMode,
    /// `None` runs the whole pipeline.
    pub stage: Option<Stage>,
    pub t_steps: usize,
    pub reward: RewardKind,
    pub r_success: f64,
    pub syndrome_mode: SyndromeMode,
    pub hidden: usize,
    pub lr: f64,
    pub max_episodes: usize,
    pub max_steps: usize,
    pub baseline_decay: f64,
    pub eval_every: usize,
    pub curriculum: Vec<usize>,
    pub curriculum_threshold: f64,
    pub curriculum_window: usize,
    pub nu: f64,
    pub horizon: f64,
    pub grid: usize,
    pub g0: f64,
    pub sweep_d: Vec<u32>,
    pub sweep_p: Vec<f64>,
    pub sweep_tau: Vec<f64>,
    pub sweep_fs: Vec<usize>,
    pub sweep_fs_qubit: Vec<usize>,
    pub repetitions: usize,
    pub code_qubit: String,
    pub code_qutrit: String,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            seed: 0,
            code: None,
            d: 2,
            p: 0.1,
            p1: None,
            p2: None,
            tau: 0.3,
            fs: 600,
            strategy: Strategy::Brave,
            eta: 0.1,
            baseline: 0.99,
            prefs: [0.0, 0.0],
            nm_budget: 200,
            nm_step: 0.25,
            fidelity: FidelityMode::Exact,
            logical_in: None,
            mask: None,
            name: "learned".into(),
            n: 3,
            k: 1,
            errors: "x".into(),
            kl_mode: KlMode::Strict,
            stage: None,
            t_steps: 6,
            reward: RewardKind::Kl,
            r_success: 10.0,
            syndrome_mode: SyndromeMode::Modular,
            hidden: 64,
            lr: 3e-3,
            max_episodes: 20_000,
            max_steps: 200_000,
            baseline_decay: 0.9,
            eval_every: 25,
            curriculum: Vec::new(),
            curriculum_threshold: 0.9,
            curriculum_window: 100,
            nu: 0.0,
            horizon: 100.0,
            grid: 1000,
            g0: 1.0,
            sweep_d: vec![2, 3],
            sweep_p: Vec::new(),
            sweep_tau: Vec::new(),
            sweep_fs: Vec::new(),
            sweep_fs_qubit: Vec::new(),
            repetitions: 5,
            code_qubit: "bit-flip".into(),
            code_qutrit: "qutrit-shift".into(),
        }
    }

    /// Logical input after resolving `auto` for dimension `d`.
    pub fn logical_input(&self, d: u32) -> LogicalInput {
        self.logical_in.unwrap_or(if d == 2 { LogicalInput::Plus } else { LogicalInput::Zero })
    }

    /// Qutrit branch probabilities, splitting `p` evenly where unset.
    pub fn qutrit_probs(&self) -> [f64; 2] {
        [self.p1.unwrap_or(self.p / 2.0), self.p2.unwrap_or(self.p / 2.0)]
    }

    /// Grid points of a sweep as `(d, p, tau, fs)`, dimension-major.
    pub fn sweep_points(&self) -> Vec<(u32, f64, f64, usize)> {
        let mut out = Vec::new();
        for &d in &self.sweep_d {
            let mut rates = self.sweep_fs.clone();
            if d == 2 {
                rates.extend(&self.sweep_fs_qubit);
            }
            for &p in &self.sweep_p {
                for &tau in &self.sweep_tau {
                    for &fs in &rates {
                        out.push((d, p, tau, fs));
                    }
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> std::result::Result<Self, Vec<Error>> {
        let mut errors = Vec::new();
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(Error::Config(format!("line {}: expected key = value, got {line:?}", i + 1)));
                continue;
            };
            let key = key.trim().to_string();
            if !KEYS.iter().any(|(k, _)| *k == key) {
                errors.push(Error::Config(format!("line {}: unknown key {key:?}", i + 1)));
                continue;
            }
            if entries.iter().any(|(_, k, _)| *k == key) {
                errors.push(Error::Config(format!("line {}: key {key:?} given twice", i + 1)));
                continue;
            }
            entries.push((i + 1, key, value.trim().to_string()));
        }

        let mode = match entries.iter().find(|(_, k, _)| k == "mode") {
            Some((line, _, v)) => match v.parse::<Mode>() {
                Ok(m) => Some(m),
                Err(e) => {
                    errors.push(Error::Config(format!("line {line}: mode: {e}")));
                    None
                }
            },
            None => {
                errors.push(Error::Config("missing required key \"mode\"".into()));
                None
            }
        };
        let mut cfg = ExperimentConfig::new(mode.unwrap_or(Mode::Verify));
        for (line, key, value) in &entries {
            if key == "mode" {
                continue;
            }
            if let Err(e) = cfg.set(key, value) {
                errors.push(Error::Config(format!("line {line}: {key}: {e}")));
            }
        }
        if mode.is_some() {
            errors.extend(cfg.validate());
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(errors)
        }
    }

    /// Sets one key from its textual value. Range checks happen in
    /// [`validate`](Self::validate).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = value.parse()?,
            "seed" => self.seed = num(value)?,
            "code" => self.code = opt(value, |v| Ok(v.to_string()))?,
            "d" => self.d = num(value)?,
            "p" => self.p = num(value)?,
            "p1" => self.p1 = opt(value, num)?,
            "p2" => self.p2 = opt(value, num)?,
            "tau" => self.tau = num(value)?,
            "fs" => self.fs = num(value)?,
            "strategy" => self.strategy = value.parse()?,
            "eta" => self.eta = num(value)?,
            "baseline" => self.baseline = num(value)?,
            "pref_keep" => self.prefs[0] = num(value)?,
            "pref_retrain" => self.prefs[1] = num(value)?,
            "nm_budget" => self.nm_budget = num(value)?,
            "nm_step" => self.nm_step = num(value)?,
            "fidelity" => self.fidelity = parse_fidelity(value)?,
            "logical_in" => self.logical_in = if value == "auto" { None } else { Some(value.parse()?) },
            "mask" => self.mask = if value == "all" { None } else { Some(list(value, parse_bit)?) },
            "name" => self.name = value.to_string(),
            "n" => self.n = num(value)?,
            "k" => self.k = num(value)?,
            "errors" => self.errors = value.to_string(),
            "kl_mode" => self.kl_mode = value.parse()?,
            "stage" => self.stage = if value == "pipeline" { None } else { Some(value.parse()?) },
            "t_steps" => self.t_steps = num(value)?,
            "reward" => {
                self.reward = match value {
                    "kl" => RewardKind::Kl,
                    "shaped" => RewardKind::Shaped,
                    other => return Err(Error::Invalid(format!("unknown reward {other:?}"))),
                }
            }
            "r_success" => self.r_success = num(value)?,
            "syndrome_mode" => self.syndrome_mode = value.parse()?,
            "learner" => {
                if value != "reinforce" {
                    return Err(Error::Invalid(format!("unsupported learner {value:?}, only reinforce is implemented")));
                }
            }
            "hidden" => self.hidden = num(value)?,
            "lr" => self.lr = num(value)?,
            "max_episodes" => self.max_episodes = num(value)?,
            "max_steps" => self.max_steps = num(value)?,
            "baseline_decay" => self.baseline_decay = num(value)?,
            "eval_every" => self.eval_every = num(value)?,
            "curriculum" => self.curriculum = list(value, num)?,
            "curriculum_threshold" => self.curriculum_threshold = num(value)?,
            "curriculum_window" => self.curriculum_window = num(value)?,
            "nu" => self.nu = num(value)?,
            "horizon" => self.horizon = num(value)?,
            "grid" => self.grid = num(value)?,
            "g0" => self.g0 = num(value)?,
            "sweep_d" => self.sweep_d = list(value, num)?,
            "sweep_p" => self.sweep_p = list(value, num)?,
            "sweep_tau" => self.sweep_tau = list(value, num)?,
            "sweep_fs" => self.sweep_fs = list(value, num)?,
            "sweep_fs_qubit" => self.sweep_fs_qubit = list(value, num)?,
            "repetitions" => self.repetitions = num(value)?,
            "code_qubit" => self.code_qubit = value.to_string(),
            "code_qutrit" => self.code_qutrit = value.to_string(),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Range and presence checks; returns every violation.
    pub fn validate(&self) -> Vec<Error> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, key: &str, msg: String| {
            if !ok {
                errs.push(Error::Config(format!("{key}: {msg}")));
            }
        };
        let prob = |v: f64| (0.0..1.0).contains(&v);
        let positive = |v: f64| v.is_finite() && v > 0.0;
        check(matches!(self.d, 2 | 3), "d", format!("must be 2 or 3, got {}", self.d));
        check(prob(self.p), "p", format!("must lie in [0, 1), got {}", self.p));
        for (key, v) in [("p1", self.p1), ("p2", self.p2)] {
            if let Some(v) = v {
                check(prob(v), key, format!("must lie in [0, 1), got {v}"));
            }
        }
        if self.p1.is_some() || self.p2.is_some() {
            let [a, b] = self.qutrit_probs();
            check(a + b < 1.0, "p1", format!("p1 + p2 must stay below 1, got {}", a + b));
        }
        check(positive(self.tau), "tau", format!("must be positive, got {}", self.tau));
        check(self.fs >= 1, "fs", "must be at least 1".into());
        check(positive(self.eta), "eta", format!("must be positive, got {}", self.eta));
        check((0.0..=1.0).contains(&self.baseline), "baseline", format!("must lie in [0, 1], got {}", self.baseline));
        check(self.prefs.iter().all(|v| v.is_finite()), "pref_keep", "preferences must be finite".into());
        check(self.nm_budget >= 1, "nm_budget", "must be at least 1".into());
        check(positive(self.nm_step), "nm_step", format!("must be positive, got {}", self.nm_step));
        if let FidelityMode::Sampled { shots } = self.fidelity {
            check(shots >= 1, "fidelity", "needs at least one shot".into());
        }
        if let Some(mask) = &self.mask {
            let want = (self.d * self.d - 1) as usize;
            check(
                self.mode != Mode::Adapt || mask.len() == want,
                "mask",
                format!("needs {want} entries for d = {}, got {}", self.d, mask.len()),
            );
        }
        check(self.n >= 1 && self.k <= self.n, "k", format!("need 1 <= n and k <= n, got n = {}, k = {}", self.n, self.k));
        check(self.t_steps >= 1, "t_steps", "must be at least 1".into());
        check(positive(self.r_success), "r_success", format!("must be positive, got {}", self.r_success));
        check(self.hidden >= 1, "hidden", "must be at least 1".into());
        check(positive(self.lr), "lr", format!("must be positive, got {}", self.lr));
        check((0.0..1.0).contains(&self.baseline_decay), "baseline_decay", format!("must lie in [0, 1), got {}", self.baseline_decay));
        check(
            self.curriculum_threshold > 0.0 && self.curriculum_threshold <= 1.0,
            "curriculum_threshold",
            format!("must lie in (0, 1], got {}", self.curriculum_threshold),
        );
        check(self.curriculum_window >= 1, "curriculum_window", "must be at least 1".into());
        check(self.nu.is_finite() && self.nu >= 0.0, "nu", format!("must be nonnegative, got {}", self.nu));
        check(positive(self.horizon), "horizon", format!("must be positive, got {}", self.horizon));
        check(self.grid >= 1, "grid", "must be at least 1".into());
        check(self.g0.is_finite() && self.g0 >= 0.0, "g0", format!("must be nonnegative, got {}", self.g0));
        check(self.sweep_d.iter().all(|d| matches!(d, 2 | 3)), "sweep_d", "dimensions must be 2 or 3".into());
        check(self.sweep_p.iter().all(|&v| prob(v)), "sweep_p", "values must lie in [0, 1)".into());
        check(self.sweep_tau.iter().all(|&v| positive(v)), "sweep_tau", "values must be positive".into());
        check(self.sweep_fs.iter().chain(&self.sweep_fs_qubit).all(|&v| v >= 1), "sweep_fs", "values must be at least 1".into());
        check(self.repetitions >= 1, "repetitions", "must be at least 1".into());
        match self.mode {
            Mode::Verify => check(self.code.is_some(), "code", "required for mode verify".into()),
            Mode::Discover => check(
                self.stage.is_none() || self.stage == Some(Stage::Encoder) || self.code.is_some(),
                "code",
                "the syndrome and recovery stages need a base code".into(),
            ),
            Mode::Sweep => {
                check(!self.sweep_p.is_empty(), "sweep_p", "required for mode sweep".into());
                check(!self.sweep_tau.is_empty(), "sweep_tau", "required for mode sweep".into());
                check(!self.sweep_fs.is_empty() || !self.sweep_fs_qubit.is_empty(), "sweep_fs", "required for mode sweep".into());
            }
            Mode::Adapt | Mode::Regret => {}
        }
        errs
    }

    /// Canonical text form listing every key.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (key, _) in KEYS {
            let _ = writeln!(out, "{key} = {}", self.value_of(key));
        }
        out
    }

    fn value_of(&self, key: &str) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        }
        fn or_empty(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        match key {
            "mode" => self.mode.to_string(),
            "seed" => self.seed.to_string(),
            "code" => self.code.clone().unwrap_or_default(),
            "d" => self.d.to_string(),
            "p" => self.p.to_string(),
            "p1" => or_empty(self.p1),
            "p2" => or_empty(self.p2),
            "tau" => self.tau.to_string(),
            "fs" => self.fs.to_string(),
            "strategy" => self.strategy.to_string(),
            "eta" => self.eta.to_string(),
            "baseline" => self.baseline.to_string(),
            "pref_keep" => self.prefs[0].to_string(),
            "pref_retrain" => self.prefs[1].to_string(),
            "nm_budget" => self.nm_budget.to_string(),
            "nm_step" => self.nm_step.to_string(),
            "fidelity" => match self.fidelity {
                FidelityMode::Exact => "exact".into(),
                FidelityMode::Sampled { shots } => format!("sampled:{shots}"),
            },
            "logical_in" => self.logical_in.map_or_else(|| "auto".into(), |l| l.to_string()),
            "mask" => self.mask.as_ref().map_or_else(|| "all".into(), |m| join(&m.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())),
            "name" => self.name.clone(),
            "n" => self.n.to_string(),
            "k" => self.k.to_string(),
            "errors" => self.errors.clone(),
            "kl_mode" => self.kl_mode.to_string(),
            "stage" => self.stage.map_or_else(|| "pipeline".into(), |s| s.to_string()),
            "t_steps" => self.t_steps.to_string(),
            "reward" => match self.reward {
                RewardKind::Kl => "kl".into(),
                RewardKind::Shaped => "shaped".into(),
            },
            "r_success" => self.r_success.to_string(),
            "syndrome_mode" => self.syndrome_mode.to_string(),
            "learner" => "reinforce".into(),
            "hidden" => self.hidden.to_string(),
            "lr" => self.lr.to_string(),
            "max_episodes" => self.max_episodes.to_string(),
            "max_steps" => self.max_steps.to_string(),
            "baseline_decay" => self.baseline_decay.to_string(),
            "eval_every" => self.eval_every.to_string(),
            "curriculum" => join(&self.curriculum),
            "curriculum_threshold" => self.curriculum_threshold.to_string(),
            "curriculum_window" => self.curriculum_window.to_string(),
            "nu" => self.nu.to_string(),
            "horizon" => self.horizon.to_string(),
            "grid" => self.grid.to_string(),
            "g0" => self.g0.to_string(),
            "sweep_d" => join(&self.sweep_d),
            "sweep_p" => join(&self.sweep_p),
            "sweep_tau" => join(&self.sweep_tau),
            "sweep_fs" => join(&self.sweep_fs),
            "sweep_fs_qubit" => join(&self.sweep_fs_qubit),
            "repetitions" => self.repetitions.to_string(),
            "code_qubit" => self.code_qubit.clone(),
            "code_qutrit" => self.code_qutrit.clone(),
            _ => unreachable!("key table and serializer out of sync: {key}"),
        }
    }
}

/// Reads and parses a config file, joining all problems into one error.
pub fn parse_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::parse(&text).map_err(|errs| Error::ConfigList(errs.iter().map(ToString::to_string).collect()))
}

/// Help text listing every key.
pub fn keys_help() -> String {
    let width = KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    KEYS.iter().map(|(k, doc)| format!("  {k:<width$}  {doc}\n")).collect()
}

fn num<T: FromStr>(s: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| Error::Invalid(format!("cannot parse {s:?}: {e}")))
}

fn opt<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| f(x.trim())).collect()
}

fn parse_bit(s: &str) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::Invalid(format!("mask entries are 0 or 1, got {other:?}"))),
    }
}

fn parse_fidelity(s: &str) -> Result<FidelityMode> {
    if s == "exact" {
        return Ok(FidelityMode::Exact);
    }
    match s.strip_prefix("sampled:") {
        Some(shots) => Ok(FidelityMode::Sampled { shots: num(shots)? }),
        None => Err(Error::Invalid(format!("expected exact or sampled:<shots>, got {s:?}"))),
    }
}
