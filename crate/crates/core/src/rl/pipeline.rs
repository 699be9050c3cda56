//! Encoder, then syndrome, then recovery: each stage is trained, frozen and
//! handed to the next.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    greedy_rollout, mixmatch_compose, Activation, Context, CurriculumPlan, ElementarySyndromeEnv, EncoderEnv,
    EncoderReward, Env, Policy, PolicyConfig, RecoveryEnv, Reinforce, SyndromeEnv, TrainConfig, TrainLog,
};
use crate::codes::{check_kl, logical_basis, run_cycle_with_error, single_qudit_paulis, CodeSpec, KlMode, Syndrome};
use crate::error::{Error, Result};
use crate::gates::Circuit;
use crate::pauli::{syndrome_of, PauliWord, StabilizerSet};
use crate::state::QuditState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyndromeMode {
    /// One policy per ancilla, composed by time slice.
    Modular,
    /// A single policy choosing Pauli, ancilla and data qudit each step.
    Elementary,
}

impl FromStr for SyndromeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modular" => Ok(SyndromeMode::Modular),
            "elementary" => Ok(SyndromeMode::Elementary),
            other => Err(Error::Parse(format!("unknown syndrome mode '{other}' (modular | elementary)"))),
        }
    }
}

impl fmt::Display for SyndromeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyndromeMode::Modular => "modular",
            SyndromeMode::Elementary => "elementary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Encoder,
    Syndrome,
    Recovery,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Encoder => "encoder",
            Stage::Syndrome => "syndrome",
            Stage::Recovery => "recovery",
        })
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encoder" => Ok(Stage::Encoder),
            "syndrome" => Ok(Stage::Syndrome),
            "recovery" => Ok(Stage::Recovery),
            other => Err(Error::Parse(format!("unknown stage '{other}'"))),
        }
    }
}

/// Error sets by name, joined with `+`:
/// `x`, `z`, `y` (one per qudit), `single` (every single-qudit Pauli),
/// `erasure:<q>` (every Pauli on qudit q), `words:<w1>;<w2>` (explicit words,
/// qubit letters or the full `X^a Z^b (x) ...` syntax), `none`.
pub fn error_set(spec: &str, d: u32, n: usize) -> Result<Vec<PauliWord>> {
    let mut out: Vec<PauliWord> = Vec::new();
    for part in spec.split('+').map(str::trim) {
        let words: Vec<PauliWord> = match part {
            "none" | "" => Vec::new(),
            "x" => (0..n).map(|q| PauliWord::x_on(d, n, q)).collect(),
            "z" => (0..n).map(|q| PauliWord::z_on(d, n, q)).collect(),
            "y" => (0..n).map(|q| PauliWord::y_on(d, n, q)).collect(),
            "single" => single_qudit_paulis(d, n),
            _ => {
                if let Some(q) = part.strip_prefix("erasure:") {
                    let q: usize = q.parse().map_err(|_| Error::Parse(format!("bad erasure qudit '{q}'")))?;
                    if q >= n {
                        return Err(Error::Target(q));
                    }
                    single_qudit_paulis(d, n).into_iter().filter(|w| w.weight() == 1 && (w.x[q] != 0 || w.z[q] != 0)).collect()
                } else if let Some(list) = part.strip_prefix("words:") {
                    list.split(';')
                        .map(|w| {
                            let w = w.trim();
                            let word = if d == 2 && w.chars().all(|c| "IXYZ".contains(c)) {
                                PauliWord::from_letters(w)?
                            } else {
                                PauliWord::parse(d, w)?
                            };
                            if word.n() != n {
                                return Err(Error::Dimension { expected: n, got: word.n() });
                            }
                            Ok(word)
                        })
                        .collect::<Result<_>>()?
                } else {
                    return Err(Error::Parse(format!("unknown error set '{part}'")));
                }
            }
        };
        for w in words {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryConfig {
    pub name: String,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub errors: Vec<PauliWord>,
    pub kl_mode: KlMode,
    /// Maximum encoder depth.
    pub t_steps: usize,
    pub encoder_reward: EncoderReward,
    pub syndrome_mode: SyndromeMode,
    pub policy: PolicyConfig,
    /// Per-stage budget; `max_steps` is shared by all sub-policies of a stage.
    pub train: TrainConfig,
    /// Sizes of the nested error-set prefixes used before the full set.
    pub curriculum: Vec<usize>,
    pub curriculum_threshold: f64,
    pub curriculum_window: usize,
    pub seed: u64,
}

impl DiscoveryConfig {
    pub fn new(name: &str, d: u32, n: usize, k: usize, errors: Vec<PauliWord>) -> Self {
        Self {
            name: name.to_string(),
            d,
            n,
            k,
            errors,
            kl_mode: KlMode::Strict,
            t_steps: 6,
            encoder_reward: EncoderReward::default(),
            syndrome_mode: SyndromeMode::Modular,
            policy: PolicyConfig::default(),
            train: TrainConfig::default(),
            curriculum: Vec::new(),
            curriculum_threshold: 0.9,
            curriculum_window: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageLog {
    pub stage: Stage,
    /// Which sub-policy: ancilla index or syndrome.
    pub label: String,
    pub log: TrainLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub logs: Vec<StageLog>,
    /// Environment steps used per stage.
    pub steps: BTreeMap<Stage, usize>,
    pub encoder: Option<Circuit>,
    pub stabilizers: Option<StabilizerSet>,
    pub code: Option<CodeSpec>,
    /// First stage that ran out of budget.
    pub failed: Option<Stage>,
}

impl PipelineResult {
    pub fn succeeded(&self) -> bool {
        self.code.is_some()
    }

    fn fail(mut self, stage: Stage) -> Self {
        self.failed = Some(stage);
        self
    }
}

fn train_encoder(cfg: &DiscoveryConfig, rng: &mut dyn RngCore) -> Result<(TrainLog, Option<Circuit>, Vec<QuditState>)> {
    let mut plan = if cfg.curriculum.is_empty() {
        None
    } else {
        Some(CurriculumPlan::prefixes(&cfg.errors, &cfg.curriculum, cfg.curriculum_threshold, cfg.curriculum_window)?)
    };
    let first = plan.as_ref().map_or_else(|| cfg.errors.clone(), |p| p.task().to_vec());
    let mut env = EncoderEnv::new(cfg.d, cfg.n, cfg.k, first, cfg.kl_mode, cfg.t_steps, cfg.encoder_reward)?;
    let mut policy = Policy::new(env.obs_dim(), env.n_actions(), cfg.policy, rng)?;
    let mut learner = Reinforce::new(cfg.train.baseline_decay);
    let mut log = TrainLog { episodes: Vec::new(), env_steps: 0, converged: false };
    while log.episodes.len() < cfg.train.max_episodes && log.env_steps < cfg.train.max_steps {
        let ep = learner.episode(&mut env, &mut policy, rng)?;
        log.env_steps += ep.steps;
        let solved = ep.solved;
        log.episodes.push(ep);
        if let Some(p) = plan.as_mut() {
            if p.record(solved) {
                env.set_errors(p.task().to_vec());
            }
        }
        let on_last = plan.as_ref().is_none_or(CurriculumPlan::is_last);
        if on_last && cfg.train.eval_every > 0 && log.episodes.len().is_multiple_of(cfg.train.eval_every) {
            let mut probe = env.clone();
            if greedy_rollout(&mut probe, &policy, rng)?.1 {
                log.converged = true;
                return Ok((log, Some(probe.circuit().clone()), probe.codewords().to_vec()));
            }
        }
    }
    Ok((log, None, Vec::new()))
}

fn remaining(cfg: &TrainConfig, used: usize) -> TrainConfig {
    TrainConfig { max_steps: cfg.max_steps.saturating_sub(used), ..*cfg }
}

fn train_syndromes_modular(
    cfg: &DiscoveryConfig,
    basis: &[QuditState],
    rng: &mut dyn RngCore,
    logs: &mut Vec<StageLog>,
) -> Result<(usize, Option<Vec<PauliWord>>)> {
    let rows = cfg.n - cfg.k;
    let mut learned: Vec<PauliWord> = Vec::new();
    let mut policies = Vec::new();
    let mut used = 0;
    for j in 0..rows {
        let mut env = SyndromeEnv::new(basis.to_vec(), rows, cfg.errors.clone(), learned.clone())?;
        let mut policy = Policy::new(env.obs_dim(), env.n_actions(), cfg.policy, rng)?;
        let budget = remaining(&cfg.train, used);
        if budget.max_steps == 0 {
            return Ok((used, None));
        }
        let log = super::train_policy(&mut env, &mut policy, &budget, rng)?;
        used += log.env_steps;
        let converged = log.converged;
        logs.push(StageLog { stage: Stage::Syndrome, label: format!("ancilla {j}"), log });
        if !converged {
            return Ok((used, None));
        }
        greedy_rollout(&mut env, &policy, rng)?;
        let check = env.last_check().expect("finished episode").clone();
        learned.push(check.word);
        policies.push(policy);
    }
    // replay the frozen sub-policies through the time-sliced composite
    let n = cfg.n;
    let slices = (0..rows).map(|j| Activation::TimeSlice(j * n..(j + 1) * n)).collect();
    let composite = mixmatch_compose(policies, slices)?;
    let mut replay: Vec<PauliWord> = Vec::new();
    for j in 0..rows {
        let mut env = SyndromeEnv::new(basis.to_vec(), rows, cfg.errors.clone(), replay.clone())?;
        let mut obs = env.reset(rng)?;
        for q in 0..n {
            obs = env.step(composite.greedy(&obs, Context::Time(j * n + q))?)?.obs;
        }
        replay.push(env.last_check().expect("finished episode").word.clone());
    }
    debug_assert_eq!(replay, learned);
    Ok((used, Some(replay)))
}

fn train_syndromes_elementary(
    cfg: &DiscoveryConfig,
    basis: &[QuditState],
    rng: &mut dyn RngCore,
    logs: &mut Vec<StageLog>,
) -> Result<(usize, Option<Vec<PauliWord>>)> {
    let mut env = ElementarySyndromeEnv::new(basis.to_vec(), cfg.n - cfg.k, cfg.errors.clone())?;
    let mut policy = Policy::new(env.obs_dim(), env.n_actions(), cfg.policy, rng)?;
    let log = super::train_policy(&mut env, &mut policy, &cfg.train, rng)?;
    let used = log.env_steps;
    let converged = log.converged;
    logs.push(StageLog { stage: Stage::Syndrome, label: "all ancillas".into(), log });
    if !converged {
        return Ok((used, None));
    }
    greedy_rollout(&mut env, &policy, rng)?;
    Ok((used, env.result().map(<[PauliWord]>::to_vec)))
}

fn train_recovery(
    cfg: &DiscoveryConfig,
    encoder: &Circuit,
    stabs: &StabilizerSet,
    rng: &mut dyn RngCore,
    logs: &mut Vec<StageLog>,
) -> Result<(usize, Option<BTreeMap<Syndrome, PauliWord>>)> {
    let mut syndromes = BTreeSet::new();
    for e in &cfg.errors {
        let s = Syndrome(syndrome_of(e, stabs)?);
        if !s.is_trivial() {
            syndromes.insert(s);
        }
    }
    let mut used = 0;
    let mut policies = Vec::new();
    let mut activations = Vec::new();
    let mut envs = Vec::new();
    for s in syndromes {
        let mut env = RecoveryEnv::new(encoder.clone(), cfg.k, stabs.clone(), s.clone(), &cfg.errors)?;
        let mut policy = Policy::new(env.obs_dim(), env.n_actions(), cfg.policy, rng)?;
        let budget = remaining(&cfg.train, used);
        if budget.max_steps == 0 {
            return Ok((used, None));
        }
        let log = super::train_policy(&mut env, &mut policy, &budget, rng)?;
        used += log.env_steps;
        logs.push(StageLog { stage: Stage::Recovery, label: format!("syndrome {s}"), log });
        let obs = env.reset(rng)?;
        if !env.corrects_all(policy.greedy(&obs))? {
            return Ok((used, None));
        }
        policies.push(policy);
        activations.push(Activation::Syndrome(s));
        envs.push(env);
    }
    let mut table = BTreeMap::new();
    if policies.is_empty() {
        return Ok((used, Some(table)));
    }
    let composite = mixmatch_compose(policies, activations)?;
    for mut env in envs {
        let s = env.syndrome().clone();
        let obs = env.reset(rng)?;
        let a = composite.greedy(&obs, Context::Syndrome(&s))?;
        table.insert(s, env.actions()[a].clone());
    }
    Ok((used, Some(table)))
}

/// Runs the three stages with a single seeded ChaCha8 stream.
pub fn run_pipeline(cfg: &DiscoveryConfig) -> Result<PipelineResult> {
    run_span(cfg, Stage::Encoder, Stage::Recovery, None)
}

/// Trains one stage on its own. The syndrome stage takes its encoder from
/// `base`; the recovery stage takes the encoder and the stabilizers.
pub fn run_stage(cfg: &DiscoveryConfig, stage: Stage, base: Option<&CodeSpec>) -> Result<PipelineResult> {
    run_span(cfg, stage, stage, base)
}

fn run_span(cfg: &DiscoveryConfig, first: Stage, last: Stage, base: Option<&CodeSpec>) -> Result<PipelineResult> {
    if cfg.k > cfg.n || cfg.n == 0 {
        return Err(Error::Invalid(format!("need 0 <= k <= n and n > 0, got k = {}, n = {}", cfg.k, cfg.n)));
    }
    let base = match (first, base) {
        (Stage::Encoder, _) => None,
        (_, Some(b)) if (b.d, b.n, b.k) == (cfg.d, cfg.n, cfg.k) => Some(b),
        (_, Some(b)) => {
            return Err(Error::Invalid(format!(
                "base code {} has (d, n, k) = ({}, {}, {}), config asks for ({}, {}, {})",
                b.name, b.d, b.n, b.k, cfg.d, cfg.n, cfg.k
            )))
        }
        (s, None) => return Err(Error::Invalid(format!("the {s} stage needs a base code"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut res = PipelineResult {
        logs: Vec::new(),
        steps: BTreeMap::new(),
        encoder: None,
        stabilizers: None,
        code: None,
        failed: None,
    };

    let (encoder, basis) = match base {
        None => {
            let (log, encoder, basis) = train_encoder(cfg, &mut rng)?;
            res.steps.insert(Stage::Encoder, log.env_steps);
            res.logs.push(StageLog { stage: Stage::Encoder, label: "encoder".into(), log });
            let Some(encoder) = encoder else {
                return Ok(res.fail(Stage::Encoder));
            };
            (encoder, basis)
        }
        Some(b) => (b.encoder.clone(), logical_basis(b)?),
    };
    res.encoder = Some(encoder.clone());
    if last == Stage::Encoder {
        return Ok(res);
    }

    let words = if let (Stage::Recovery, Some(b)) = (first, base) {
        Some(b.stabilizers.generators.clone())
    } else if cfg.errors.is_empty() {
        // nothing to detect without errors
        Some(Vec::new())
    } else {
        let (used, words) = match cfg.syndrome_mode {
            SyndromeMode::Modular => train_syndromes_modular(cfg, &basis, &mut rng, &mut res.logs)?,
            SyndromeMode::Elementary => train_syndromes_elementary(cfg, &basis, &mut rng, &mut res.logs)?,
        };
        res.steps.insert(Stage::Syndrome, used);
        words
    };
    let Some(words) = words else {
        return Ok(res.fail(Stage::Syndrome));
    };
    let stabs = StabilizerSet::new(words)?;
    res.stabilizers = Some(stabs.clone());
    if last == Stage::Syndrome {
        return Ok(res);
    }

    let detect_only = cfg.kl_mode == KlMode::Detection;
    let table = if detect_only {
        BTreeMap::new()
    } else {
        let (used, table) = train_recovery(cfg, &encoder, &stabs, &mut rng, &mut res.logs)?;
        res.steps.insert(Stage::Recovery, used);
        match table {
            Some(t) => t,
            None => return Ok(res.fail(Stage::Recovery)),
        }
    };
    let code = CodeSpec::from_parts(&cfg.name, encoder, cfg.k, stabs, table, cfg.errors.clone(), detect_only, cfg.kl_mode)?;

    if !check_kl(&code, &code.correctable, code.kl_mode)?.all_satisfied() {
        return Ok(res.fail(first));
    }
    if !detect_only {
        for e in &code.correctable {
            for _ in 0..5 {
                let psi = QuditState::random(code.d, code.k, &mut rng)?;
                if run_cycle_with_error(&code, e, &psi, &mut rng)?.0 < 1.0 - 1e-9 {
                    return Ok(res.fail(Stage::Recovery));
                }
            }
        }
    }
    res.code = Some(code);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{bit_flip, phase_flip, qutrit_erasure};

    #[test]
    fn error_set_specs() {
        assert_eq!(error_set("x", 2, 3).unwrap().len(), 3);
        assert_eq!(error_set("x+z", 2, 3).unwrap().len(), 6);
        assert_eq!(error_set("x+x", 2, 3).unwrap().len(), 3);
        assert_eq!(error_set("single", 3, 2).unwrap().len(), 16);
        let er = error_set("erasure:2", 3, 3).unwrap();
        assert_eq!(er.len(), 8);
        assert!(er.iter().all(|w| w.x[..2] == [0, 0] && w.z[..2] == [0, 0]));
        assert_eq!(error_set("words:XII;IZI", 2, 3).unwrap()[1], PauliWord::z_on(2, 3, 1));
        assert!(error_set("none", 2, 3).unwrap().is_empty());
        assert!(error_set("words:XI", 2, 3).is_err());
        assert!(error_set("erasure:3", 2, 3).is_err());
        assert!(error_set("q", 2, 3).is_err());
    }

    #[test]
    fn empty_error_set_is_trivial() {
        let cfg = DiscoveryConfig::new("trivial", 2, 2, 1, vec![]);
        let res = run_pipeline(&cfg).unwrap();
        let code = res.code.expect("trivial code");
        assert!(code.stabilizers.is_empty());
        assert_eq!(res.steps[&Stage::Encoder], res.logs[0].log.episodes.iter().map(|e| e.steps).sum::<usize>());
    }

    #[test]
    fn discovers_bit_flip_group() {
        let mut found = false;
        for seed in 0..5 {
            let mut cfg = DiscoveryConfig::new("learned-x", 2, 3, 1, error_set("x", 2, 3).unwrap());
            cfg.seed = seed;
            let res = run_pipeline(&cfg).unwrap();
            if let Some(code) = res.code {
                if code.stabilizers.same_group(&bit_flip().unwrap().stabilizers).unwrap() {
                    found = true;
                    break;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let mut cfg = DiscoveryConfig::new("learned-x", 2, 3, 1, error_set("x", 2, 3).unwrap());
        cfg.seed = 3;
        cfg.train.max_steps = 3000;
        let a = run_pipeline(&cfg).unwrap();
        let b = run_pipeline(&cfg).unwrap();
        assert_eq!(a, b);
    }

    fn discovers(name: &str, spec: &str, mode: SyndromeMode, t_steps: usize, target: &StabilizerSet) -> bool {
        (0..5).any(|seed| {
            let mut cfg = DiscoveryConfig::new(name, 2, 3, 1, error_set(spec, 2, 3).unwrap());
            cfg.seed = seed;
            cfg.t_steps = t_steps;
            cfg.syndrome_mode = mode;
            let res = run_pipeline(&cfg).unwrap();
            res.steps.values().all(|&s| s <= 200_000)
                && res.code.is_some_and(|c| c.stabilizers.same_group(target).unwrap())
        })
    }

    #[test]
    fn discovers_phase_flip_group() {
        assert!(discovers("learned-z", "z", SyndromeMode::Modular, 8, &phase_flip().unwrap().stabilizers));
    }

    #[test]
    fn elementary_mode_finds_bit_flip_group() {
        assert!(discovers("learned-x", "x", SyndromeMode::Elementary, 6, &bit_flip().unwrap().stabilizers));
    }

    #[test]
    fn syndrome_stage_on_fixed_encoder() {
        // the erasure task has many valid codes, so pin the encoder
        let base = qutrit_erasure().unwrap();
        let mut cfg = DiscoveryConfig::new("erasure", 3, 3, 1, error_set("erasure:2", 3, 3).unwrap());
        let found = (0..3).any(|seed| {
            cfg.seed = seed;
            let res = run_stage(&cfg, Stage::Syndrome, Some(&base)).unwrap();
            assert!(res.logs.iter().all(|l| l.stage == Stage::Syndrome));
            res.stabilizers.is_some_and(|s| s.same_group(&base.stabilizers).unwrap())
        });
        assert!(found);
    }

    #[test]
    fn recovery_stage_on_fixed_code() {
        let base = bit_flip().unwrap();
        let mut cfg = DiscoveryConfig::new("bit-flip", 2, 3, 1, base.correctable.clone());
        cfg.seed = 1;
        let res = run_stage(&cfg, Stage::Recovery, Some(&base)).unwrap();
        let code = res.code.expect("recovery converged");
        for e in &base.correctable {
            let s = code.syndrome(e).unwrap();
            assert_eq!(code.recovery(&s).unwrap(), base.recovery(&s).unwrap());
        }
    }

    #[test]
    fn stage_needs_matching_base() {
        let cfg = DiscoveryConfig::new("x", 2, 3, 1, error_set("x", 2, 3).unwrap());
        assert!(run_stage(&cfg, Stage::Syndrome, None).is_err());
        let other = qutrit_erasure().unwrap();
        assert!(run_stage(&cfg, Stage::Recovery, Some(&other)).is_err());
        let enc = run_stage(&cfg, Stage::Encoder, None).unwrap();
        assert!(enc.stabilizers.is_none() && enc.steps.len() == 1);
    }
}
