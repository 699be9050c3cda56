//! Command-line front end: code verification, RL discovery, adaptive runs,
//! regret simulation and parameter sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::LazyLock;

use adaptqec::config::{keys_help, parse_config, ExperimentConfig, Mode};
use adaptqec::experiment;
use adaptqec::rl::Stage;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

static KEYS_HELP: LazyLock<String> = LazyLock::new(|| {
    format!(
        "Config files hold one `key = value` per line; `#` starts a comment.\n\
         CSV outputs begin with a `# adaptqec <kind> v<version> rng=ChaCha8Rng seed=<seed>` line.\n\n\
         Config keys:\n{}",
        keys_help()
    )
});

#[derive(Parser)]
#[command(name = "adaptqec", version, about = "Qudit stabilizer codes: verification, RL discovery and bandit adaptation")]
#[command(after_long_help = KEYS_HELP.as_str())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a registry code against the Knill-Laflamme conditions and its
    /// printed syndrome table. Exits 1 on any violation or mismatch.
    VerifyCode {
        #[arg(long)]
        code: String,
    },
    /// Train the encoder, syndrome or recovery agent, or the whole pipeline.
    /// Writes `catalog.txt` (on success) and `curves.csv` to the output
    /// directory; curves columns are stage, policy, episode, reward, depth.
    #[command(after_long_help = KEYS_HELP.as_str())]
    Discover {
        #[arg(long, value_parser = ["encoder", "syndrome", "recovery", "pipeline"])]
        stage: Option<String>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// One adaptive (or static) run under the drifting channel. CSV columns:
    /// t, alpha, action, fidelity, theta_0 .. theta_{d^2-2}.
    #[command(after_long_help = KEYS_HELP.as_str())]
    Adapt {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the instantaneous-regret equation. CSV columns: t, g,
    /// cumulative, reference_nu0.
    Regret {
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        p: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        g0: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Adaptive and static runs over a parameter grid, in parallel. Writes
    /// `sweep.csv` with mean and standard deviation per grid point.
    #[command(after_long_help = KEYS_HELP.as_str())]
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: &Path, mode: Mode, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = parse_config(path).with_context(|| format!("reading {}", path.display()))?;
    if cfg.mode != mode {
        bail!("{} is a {} config, expected mode = {mode}", path.display(), cfg.mode);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::VerifyCode { code } => {
            let report = experiment::verify_code(&code)?;
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::Discover { stage, config, seed, out } => {
            let mut cfg = load(&config, Mode::Discover, seed)?;
            if let Some(s) = stage {
                cfg.stage = if s == "pipeline" { None } else { Some(s.parse::<Stage>()?) };
                if let Some(e) = cfg.validate().into_iter().next() {
                    bail!(e);
                }
            }
            let res = experiment::discover(&cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(&out.join("curves.csv"), &res.curves)?;
            for (stage, steps) in &res.result.steps {
                println!("{stage}: {steps} environment steps");
            }
            if let Some(s) = &res.result.stabilizers {
                let words: Vec<String> = s.generators.iter().map(ToString::to_string).collect();
                println!("stabilizers: {}", words.join(", "));
            }
            match res.result.failed {
                Some(stage) => {
                    println!("{stage} stage did not converge");
                    Ok(false)
                }
                None => {
                    if !res.catalog.is_empty() {
                        write(&out.join("catalog.txt"), &res.catalog)?;
                    }
                    println!("done");
                    Ok(true)
                }
            }
        }
        Command::Adapt { config, seed, out } => {
            let cfg = load(&config, Mode::Adapt, seed)?;
            let (csv, run) = experiment::adapt(&cfg)?;
            write(&out, &csv)?;
            println!(
                "mean fidelity {:.6}, fraction >= {} {:.4}, retrains {}",
                run.mean_fidelity(),
                experiment::FIDELITY_THRESHOLD,
                run.fraction_above(experiment::FIDELITY_THRESHOLD),
                run.retrains
            );
            Ok(true)
        }
        Command::Regret { eta, nu, p, horizon, grid, g0, out } => {
            let mut cfg = ExperimentConfig::new(Mode::Regret);
            cfg.eta = eta;
            cfg.nu = nu;
            cfg.p = p;
            cfg.horizon = horizon;
            cfg.grid = grid;
            cfg.g0 = g0;
            if let Some(e) = cfg.validate().into_iter().next() {
                bail!(e);
            }
            let (csv, trace) = experiment::regret(&cfg)?;
            write(&out, &csv)?;
            println!("cumulative regret at T = {horizon}: {:.6}", trace.final_cumulative());
            Ok(true)
        }
        Command::Sweep { config, seed, out } => {
            let cfg = load(&config, Mode::Sweep, seed)?;
            let (csv, rows) = experiment::sweep(&cfg)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(&out.join("sweep.csv"), &csv)?;
            println!("{} rows over {} grid points", rows.len(), cfg.sweep_points().len());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
