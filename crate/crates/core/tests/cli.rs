use std::fs;
use std::process::Command;

use selprop::format;
use selprop::harness::{read_csv, Method};
use selprop::TabularMDP;

fn selprop() -> Command {
    Command::new(env!("CARGO_BIN_EXE_selprop"))
}

#[test]
fn ci_writes_csv_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, "experiment = \"ci-chainbandit\"\nseeds = 2\nlambdas = [0.0, 0.8]\n").unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = selprop()
            .args(["ci", "--config"])
            .arg(&config)
            .args(["--episodes", "500", "--seed", "3", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = read_csv(dir.path().join("a.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| r.episodes == 500));
    let at_behavior: Vec<_> = rows.iter().filter(|r| r.lambda == Some(0.8)).collect();
    assert!(at_behavior.iter().all(|r| r.alpha_true.unwrap().abs() < 1e-15));
}

#[test]
fn learn_with_single_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("learn.csv");
    let status = selprop()
        .args(["learn", "--experiment", "learn-gridworld", "--episodes", "200", "--beta", "0.5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_csv(&out).unwrap();
    assert_eq!(rows.len(), 5 * 3);
    assert_eq!(rows[0].method, Method::Spvi);
    assert!(rows.iter().all(|r| r.episodes == 200 && r.policy_value.is_some()));
}

#[test]
fn config_errors_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "experiment = \"ci-chainbandit\"\ndelta = 2.0\n").unwrap();
    let out = selprop().args(["ci", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta"));

    let out = selprop().args(["ci", "--experiment", "learn-chainbandit"]).output().unwrap();
    assert!(!out.status.success());

    let out = selprop().args(["ci", "--experiment", "nonsense"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));

    let out = selprop().args(["ci", "--config"]).arg(dir.path().join("missing.toml")).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn alpha_prints_exact_effect() {
    let out = selprop().args(["alpha", "--lambda", "0.4"]).output().unwrap();
    assert!(out.status.success());
    let value: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((value - 0.2 * 0.4 * 0.4 * 0.4).abs() < 1e-9);
}

#[test]
fn env_dump_is_a_loadable_document() {
    let out = selprop().args(["env", "dump", "--experiment", "ci-gridworld"]).output().unwrap();
    assert!(out.status.success());
    let mdp: TabularMDP = format::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(mdp.shape(), (3, 24, 4));
}
