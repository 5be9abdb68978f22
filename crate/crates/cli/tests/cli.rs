// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn spinbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinbath"))
        .args(args)
        .output()
        .unwrap()
}

fn scenario(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    spinbath(&args)
}

fn column(csv: &str, name: &str) -> Vec<Option<f64>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().ok())
        .collect()
}

const UNCOUPLED_COLLECTIVE: &str = r#"
beta = 1.5

[[species]]
count = 6
omega = 1.0
lambda = 0.02
mu = 0.03
nu = 0.01
bloch = [0.5, 0.5, 0.0]

[grid]
t_max = 50.0
num_points = 64
"#;

#[test]
fn gamma_constant_without_collective_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(&dir, UNCOUPLED_COLLECTIVE);
    let out = run("run", &cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65);
    let rates: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rates.json")).unwrap())
            .unwrap();
    let s = &rates["species"][0];
    let expected = s["gamma_relax"].as_f64().unwrap() / 2.0 + s["gamma_cons"].as_f64().unwrap();
    for g in column(&csv, "gamma_t") {
        assert!((g.unwrap() - expected).abs() < 1e-15 * expected.max(1.0));
    }
    for l in column(&csv, "log_abs_c") {
        assert!(l.unwrap().abs() < 1e-12);
    }
}

#[test]
fn verify_passes_on_pure_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let out = run(
        "verify",
        &scenarios.join("pure_dephasing.toml"),
        dir.path(),
        &["--grid-points", "101"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.starts_with("t,exact_re,exact_im,resonance_re,resonance_im,deviation"));
    let dev: Vec<f64> = column(&csv, "deviation")
        .into_iter()
        .map(Option::unwrap)
        .collect();
    assert_eq!(dev.len(), 101);
    assert!(dev.iter().all(|d| *d < 1e-8));

    let strict = run(
        "verify",
        &scenarios.join("pure_dephasing.toml"),
        dir.path(),
        &["--tolerance", "1e-30"],
    );
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn ratio_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let out = run(
        "sweep",
        &scenarios.join("ratio_sweep.toml"),
        dir.path(),
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let g: Vec<f64> = column(&csv, "gamma_inf")
        .into_iter()
        .map(Option::unwrap)
        .collect();
    assert_eq!(g.len(), 3);
    assert!(g.windows(2).all(|w| w[1] >= w[0]), "{g:?}");
    for i in 0..3 {
        assert!(dir
            .path()
            .join(format!("point_{i:04}"))
            .join("trajectory.csv")
            .exists());
    }
}

#[test]
fn multi_species_columns() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let out = run(
        "run",
        &scenarios.join("two_species.toml"),
        dir.path(),
        &["--grid-points", "16"],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in [
        "sz_total",
        "sminus_re",
        "gamma_t",
        "sz_total_A",
        "log_abs_c_A",
        "b_t_B",
        "log_abs_c_B",
    ] {
        assert!(header.split(',').any(|h| h == col), "{col}");
    }
    assert!(!header.split(',').any(|h| h == "log_abs_c"));
    let total = column(&csv, "sz_total");
    let parts: Vec<f64> = column(&csv, "sz_total_A")
        .into_iter()
        .zip(column(&csv, "sz_total_B"))
        .map(|(a, b)| a.unwrap() + b.unwrap())
        .collect();
    for (t, p) in total.iter().zip(parts) {
        assert!((t.unwrap() - p).abs() < 1e-14);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = scenario(
        &dir,
        &UNCOUPLED_COLLECTIVE.replace("omega = 1.0", "omega = -1.0"),
    );
    let out = run("run", &bad, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("species[0].omega"));

    let missing = run("run", &dir.path().join("absent.toml"), dir.path(), &[]);
    assert_eq!(missing.status.code(), Some(1));

    let tight = scenario(
        &dir,
        &format!("{UNCOUPLED_COLLECTIVE}\n[validity]\nthreshold = 1e-6\n"),
    );
    let loose = run("rates", &tight, dir.path(), &[]);
    assert_eq!(loose.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&loose.stderr).contains("warning"));
    let strict = run("rates", &tight, &dir.path().join("strict"), &["--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(!dir.path().join("strict").join("rates.json").exists());

    let no_sweep = run("sweep", &tight, dir.path(), &[]);
    assert_eq!(no_sweep.status.code(), Some(1));
}

#[test]
fn rates_only_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(&dir, UNCOUPLED_COLLECTIVE);
    let out_dir = dir.path().join("r");
    assert!(run("rates", &cfg, &out_dir, &[]).status.success());
    let names: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, vec!["rates.json".to_string()]);
    let text = std::fs::read_to_string(out_dir.join("rates.json")).unwrap();
    assert!(text.ends_with("}\n") && !text.contains('\r'));
}
