//! Experiment drivers behind the command-line tool. Each driver returns its
//! CSV or catalog text so callers decide where it goes.
//!
//! Every CSV starts with one comment line naming the schema, its version, the
//! generator and the seed, e.g. `# adaptqec adapt v1 rng=ChaCha8Rng seed=7`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::brave::{brave_run, static_run, AdaptiveConfig, AdaptiveRun, BanditState};
use crate::codes::{check_kl, CodeSpec, KlReport, Syndrome};
use crate::config::{ExperimentConfig, RewardKind, Strategy};
use crate::error::{Error, Result};
use crate::noise::AlphaChannel;
use crate::optim::NelderMead;
use crate::regret::{log_reference, regret_simulate_from, RegretTrace};
use crate::registry::{code_by_name, golden_table, write_catalog};
use crate::rl::{error_set, run_pipeline, run_stage, DiscoveryConfig, EncoderReward, PipelineResult, PolicyConfig, TrainConfig};

/// Generator recorded in every CSV header.
pub const RNG_NAME: &str = "ChaCha8Rng";
pub const SCHEMA_VERSION: u32 = 1;

fn header(kind: &str, seed: u64) -> String {
    format!("# adaptqec {kind} v{SCHEMA_VERSION} rng={RNG_NAME} seed={seed}\n")
}

fn csv_text(kind: &str, seed: u64, columns: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(header(kind, seed) + &String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?)
}

/// Row of a printed syndrome table next to the computed syndrome.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenDiff {
    pub label: String,
    pub printed: Syndrome,
    pub computed: Syndrome,
}

impl GoldenDiff {
    pub fn matches(&self) -> bool {
        self.printed == self.computed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub code: String,
    pub kl: KlReport,
    pub golden: Vec<GoldenDiff>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.kl.all_satisfied() && self.golden.iter().all(GoldenDiff::matches)
    }

    pub fn render(&self) -> String {
        let mut out = format!("code {}\n{}\n", self.code, self.kl);
        if self.golden.is_empty() {
            out.push_str("no printed syndrome table\n");
        } else {
            out.push_str("syndrome table (label printed computed):\n");
            for g in &self.golden {
                let mark = if g.matches() { "ok" } else { "MISMATCH" };
                let _ = writeln!(out, "  {:<6} {:>6} {:>6}  {mark}", g.label, g.printed.to_string(), g.computed.to_string());
            }
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// KL check of a registry code plus a diff against its printed table.
pub fn verify_code(name: &str) -> Result<VerifyReport> {
    let code = code_by_name(name)?;
    let kl = check_kl(&code, &code.correctable, code.kl_mode)?;
    let golden = golden_table(name)
        .into_iter()
        .map(|row| Ok(GoldenDiff { computed: code.syndrome(&row.error)?, label: row.label, printed: row.printed }))
        .collect::<Result<_>>()?;
    Ok(VerifyReport { code: name.to_string(), kl, golden })
}

/// Drifting channel for dimension `d` built from the config.
pub fn channel_for(cfg: &ExperimentConfig, d: u32, p: f64, tau: f64) -> Result<AlphaChannel> {
    match d {
        2 => AlphaChannel::qubit(p, tau),
        3 => {
            let probs = if cfg.p1.is_some() || cfg.p2.is_some() { cfg.qutrit_probs().to_vec() } else { vec![p / 2.0, p / 2.0] };
            AlphaChannel::new(3, probs, tau)
        }
        _ => Err(Error::Invalid(format!("drifting channel defined for d = 2, 3 only, got {d}"))),
    }
}

pub fn adaptive_config(cfg: &ExperimentConfig, d: u32, fs: usize) -> AdaptiveConfig {
    AdaptiveConfig {
        fs,
        bandit: BanditState::new(cfg.prefs, cfg.baseline, cfg.eta),
        optimizer: NelderMead { max_evals: cfg.nm_budget, initial_step: cfg.nm_step, ..NelderMead::default() },
        mode: cfg.fidelity,
        logical_in: cfg.logical_input(d),
        mask: cfg.mask.clone(),
    }
}

fn code_for(cfg: &ExperimentConfig, d: u32) -> Result<CodeSpec> {
    let name = match (&cfg.code, d) {
        (Some(name), _) => name.as_str(),
        (None, 2) => cfg.code_qubit.as_str(),
        (None, _) => cfg.code_qutrit.as_str(),
    };
    let code = code_by_name(name)?;
    if code.d != d {
        return Err(Error::Invalid(format!("code {name} has d = {}, config asks for d = {d}", code.d)));
    }
    Ok(code)
}

/// One adaptive (or static) run. Columns: `t, alpha, action, fidelity,
/// theta_0 .. theta_{d^2-2}`.
pub fn adapt(cfg: &ExperimentConfig) -> Result<(String, AdaptiveRun)> {
    let code = code_for(cfg, cfg.d)?;
    let channel = channel_for(cfg, cfg.d, cfg.p, cfg.tau)?;
    let acfg = adaptive_config(cfg, cfg.d, cfg.fs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let run = match cfg.strategy {
        Strategy::Brave => brave_run(&code, &channel, &acfg, &mut rng)?,
        Strategy::Static => static_run(&code, &channel, &acfg, &mut rng)?,
    };
    let params = (cfg.d * cfg.d - 1) as usize;
    let mut columns: Vec<String> = ["t", "alpha", "action", "fidelity"].iter().map(|s| s.to_string()).collect();
    columns.extend((0..params).map(|i| format!("theta_{i}")));
    let rows: Vec<Vec<String>> = run
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.t.to_string(), r.alpha.to_string(), r.action.to_string(), r.fidelity.to_string()];
            row.extend(r.theta.iter().map(f64::to_string));
            row
        })
        .collect();
    Ok((csv_text("adapt", cfg.seed, &columns, &rows)?, run))
}

/// Regret trace. Columns: `t, g, cumulative, reference_nu0`, the last being
/// the closed-form cumulative regret without oscillation.
pub fn regret(cfg: &ExperimentConfig) -> Result<(String, RegretTrace)> {
    let trace = regret_simulate_from(cfg.eta, cfg.nu, cfg.p, cfg.horizon, cfg.grid, cfg.g0)?;
    let columns: Vec<String> = ["t", "g", "cumulative", "reference_nu0"].iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = (0..trace.t.len())
        .map(|i| {
            let t = trace.t[i];
            vec![t.to_string(), trace.g[i].to_string(), trace.cumulative[i].to_string(), log_reference(cfg.eta, cfg.g0, t).to_string()]
        })
        .collect();
    Ok((csv_text("regret", cfg.seed, &columns, &rows)?, trace))
}

/// Discovery settings derived from the config.
pub fn discovery_config(cfg: &ExperimentConfig) -> Result<DiscoveryConfig> {
    let errors = error_set(&cfg.errors, cfg.d, cfg.n)?;
    let mut dc = DiscoveryConfig::new(&cfg.name, cfg.d, cfg.n, cfg.k, errors);
    dc.kl_mode = cfg.kl_mode;
    dc.t_steps = cfg.t_steps;
    dc.encoder_reward = match (cfg.reward, EncoderReward::shaped()) {
        (RewardKind::Kl, _) => EncoderReward::Kl { r_success: cfg.r_success },
        (RewardKind::Shaped, EncoderReward::Shaped { r_base, r_penalty, r_boost, r_failure, .. }) => {
            EncoderReward::Shaped { r_base, r_penalty, r_boost, r_success: cfg.r_success, r_failure }
        }
        (RewardKind::Shaped, other) => other,
    };
    dc.syndrome_mode = cfg.syndrome_mode;
    dc.policy = PolicyConfig { hidden: cfg.hidden, lr: cfg.lr };
    dc.train = TrainConfig {
        max_episodes: cfg.max_episodes,
        max_steps: cfg.max_steps,
        baseline_decay: cfg.baseline_decay,
        eval_every: cfg.eval_every,
    };
    dc.curriculum = cfg.curriculum.clone();
    dc.curriculum_threshold = cfg.curriculum_threshold;
    dc.curriculum_window = cfg.curriculum_window;
    dc.seed = cfg.seed;
    Ok(dc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryOutput {
    pub result: PipelineResult,
    /// Catalog text of the learned code; empty when a stage failed.
    pub catalog: String,
    /// Columns: `stage, policy, episode, reward, depth`.
    pub curves: String,
}

/// Runs the configured stage, or the whole pipeline.
pub fn discover(cfg: &ExperimentConfig) -> Result<DiscoveryOutput> {
    let dc = discovery_config(cfg)?;
    let result = match cfg.stage {
        None => run_pipeline(&dc)?,
        Some(stage) => {
            let base = cfg.code.as_deref().map(code_by_name).transpose()?;
            run_stage(&dc, stage, base.as_ref())?
        }
    };
    let catalog = result.code.as_ref().map(|c| write_catalog(std::slice::from_ref(c))).unwrap_or_default();
    let columns: Vec<String> = ["stage", "policy", "episode", "reward", "depth"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for log in &result.logs {
        for ep in &log.log.episodes {
            rows.push(vec![log.stage.to_string(), log.label.clone(), ep.episode.to_string(), ep.reward.to_string(), ep.depth.to_string()]);
        }
    }
    let curves = csv_text("discover", cfg.seed, &columns, &rows)?;
    Ok(DiscoveryOutput { result, catalog, curves })
}

/// Aggregated metrics of one sweep grid point and strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: u32,
    pub p: f64,
    pub tau: f64,
    pub fs: usize,
    pub strategy: Strategy,
    pub error_rate: (f64, f64),
    pub fraction: (f64, f64),
    pub retrains: (f64, f64),
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fraction threshold used by sweeps.
pub const FIDELITY_THRESHOLD: f64 = 0.99;

/// Runs every grid point `repetitions` times with both strategies. Job `j`
/// (grid point major, repetition minor) draws from stream `j` of a ChaCha8Rng
/// seeded with `seed`, so results do not depend on the worker count.
pub fn sweep(cfg: &ExperimentConfig) -> Result<(String, Vec<SweepRow>)> {
    let points = cfg.sweep_points();
    let reps = cfg.repetitions;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
    let outcomes: Vec<[(f64, f64, f64); 2]> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(i, _))| {
            let (d, p, tau, fs) = points[i];
            let code = code_for(&ExperimentConfig { code: None, ..cfg.clone() }, d)?;
            let channel = channel_for(cfg, d, p, tau)?;
            let acfg = adaptive_config(cfg, d, fs);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(j as u64);
            let stats = |run: AdaptiveRun| (run.logical_error_rate(), run.fraction_above(FIDELITY_THRESHOLD), run.retrains as f64);
            let adaptive = stats(brave_run(&code, &channel, &acfg, &mut rng)?);
            let frozen = stats(static_run(&code, &channel, &acfg, &mut rng)?);
            Ok([adaptive, frozen])
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (i, &(d, p, tau, fs)) in points.iter().enumerate() {
        let chunk = &outcomes[i * reps..(i + 1) * reps];
        for (s, strategy) in [Strategy::Brave, Strategy::Static].into_iter().enumerate() {
            let pick = |f: fn(&(f64, f64, f64)) -> f64| mean_std(&chunk.iter().map(|o| f(&o[s])).collect::<Vec<_>>());
            rows.push(SweepRow {
                d,
                p,
                tau,
                fs,
                strategy,
                error_rate: pick(|o| o.0),
                fraction: pick(|o| o.1),
                retrains: pick(|o| o.2),
            });
        }
    }
    let columns: Vec<String> = [
        "d",
        "p",
        "tau",
        "fs",
        "strategy",
        "repetitions",
        "error_rate_mean",
        "error_rate_std",
        "fraction_mean",
        "fraction_std",
        "retrains_mean",
        "retrains_std",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let text_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.p.to_string(),
                r.tau.to_string(),
                r.fs.to_string(),
                r.strategy.to_string(),
                reps.to_string(),
                r.error_rate.0.to_string(),
                r.error_rate.1.to_string(),
                r.fraction.0.to_string(),
                r.fraction.1.to_string(),
                r.retrains.0.to_string(),
                r.retrains.1.to_string(),
            ]
        })
        .collect();
    Ok((csv_text("sweep", cfg.seed, &columns, &text_rows)?, rows))
}
