use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adaptqec::config::{parse_config, Mode};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adaptqec"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn shipped_configs_parse() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
    let table = parse_config(&configs().join("sweep-table.conf")).unwrap();
    assert_eq!(table.mode, Mode::Sweep);
    assert_eq!(table.sweep_points().len(), 240);
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify-code", "--code", "bit-flip"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("KL mode strict") && text.trim_end().ends_with("PASS"));
    assert_eq!(run(&["verify-code", "--code", "five-qubit"]).status.code(), Some(1));
    assert_eq!(run(&["verify-code", "--code", "nope"]).status.code(), Some(2));
}

#[test]
fn help_documents_keys() {
    let out = run(&["adapt", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["mode", "tau", "fs", "nm_budget", "sweep_fs_qubit", "curriculum_window"] {
        assert!(text.contains(key), "{key} missing from help");
    }
}

#[test]
fn config_errors_are_all_listed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "mode = adapt\np = 1.5\ntau = 0\ncolour = red\n");
    let out = run(&["adapt", "--config", &cfg, "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    for needle in ["p:", "tau:", "colour"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }
    let wrong = write_config(dir.path(), "wrong.conf", "mode = sweep\nsweep_p = 0.1\nsweep_tau = 0.3\nsweep_fs = 10\n");
    assert_eq!(run(&["adapt", "--config", &wrong, "--out", "x.csv"]).status.code(), Some(2));
}

#[test]
fn adapt_identity_channel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "id.conf", "mode = adapt\ncode = bit-flip\np = 0\nfs = 40\n");
    let csv = dir.path().join("id.csv");
    let out = run(&["adapt", "--config", &cfg, "--seed", "3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# adaptqec adapt v1 rng=ChaCha8Rng seed=3");
    assert_eq!(lines.next().unwrap(), "t,alpha,action,fidelity,theta_0,theta_1,theta_2");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    for r in rows {
        let f: f64 = r.split(',').nth(3).unwrap().parse().unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn regret_zero_frequency_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("regret.csv");
    let out = run(&["regret", "--eta", "0.1", "--nu", "0", "--p", "0.1", "--T", "50", "--grid", "500", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[2] - last[3]).abs() / last[3] < 0.05, "{last:?}");
    assert_eq!(run(&["regret", "--eta", "-1", "--nu", "0", "--p", "0", "--T", "1", "--out", "r.csv"]).status.code(), Some(2));
}

#[test]
fn discover_stage_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("discover-bit-flip.conf");
    let out_dir = dir.path().join("run");
    let out = run(&["discover", "--stage", "pipeline", "--config", cfg.to_str().unwrap(), "--seed", "0", "--out", out_dir.to_str().unwrap()]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{stdout}");
    let catalog = fs::read_to_string(out_dir.join("catalog.txt")).unwrap();
    let learned = adaptqec::registry::parse_catalog(&catalog).unwrap();
    assert_eq!(learned.len(), 1);
    let curves = fs::read_to_string(out_dir.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().nth(1), Some("stage,policy,episode,reward,depth"));
    // syndrome stage without a base code is a config error
    let out = run(&["discover", "--stage", "syndrome", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn outputs_twice(args: &[&str], file: &Path) -> (Vec<u8>, Vec<u8>) {
    assert!(run(args).status.success());
    let a = fs::read(file).unwrap();
    fs::remove_file(file).unwrap();
    assert!(run(args).status.success());
    (a, fs::read(file).unwrap())
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let adapt_cfg = write_config(dir.path(), "a.conf", "mode = adapt\nd = 3\np = 0.1\nfs = 60\n");
    let csv = dir.path().join("a.csv");
    let (a, b) = outputs_twice(&["adapt", "--config", &adapt_cfg, "--seed", "11", "--out", csv.to_str().unwrap()], &csv);
    assert_eq!(a, b);

    let sweep_cfg = configs().join("sweep-small.conf");
    let sweep_dir = dir.path().join("sweep");
    let sweep_csv = sweep_dir.join("sweep.csv");
    let (a, b) = outputs_twice(
        &["sweep", "--config", sweep_cfg.to_str().unwrap(), "--seed", "5", "--out", sweep_dir.to_str().unwrap()],
        &sweep_csv,
    );
    assert_eq!(a, b);

    let disc_cfg = configs().join("discover-bit-flip.conf");
    let disc_dir = dir.path().join("disc");
    let curves = disc_dir.join("curves.csv");
    let (a, b) = outputs_twice(
        &["discover", "--stage", "encoder", "--config", disc_cfg.to_str().unwrap(), "--seed", "4", "--out", disc_dir.to_str().unwrap()],
        &curves,
    );
    assert_eq!(a, b);
}
