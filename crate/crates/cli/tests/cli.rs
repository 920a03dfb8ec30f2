use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lechat() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lechat"));
    c.env_remove("LECHAT_OUT_DIR");
    c
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    lechat().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn check_properties_reports_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("pricing.json");
    let out = run(&[
        "check-properties",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["objective"].as_array().unwrap().len() >= 5);
    assert!(v["costs"]["cost"].is_array());
    let csv = std::fs::read_to_string(dir.path().join("properties.csv")).unwrap();
    assert!(csv.starts_with("subject,property,holds,detail\n"));
}

#[test]
fn verify_thm1_passes() {
    let out = run(&["verify", "thm1", "--count", "10", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["counts"]["holds"], 10);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_output_is_byte_identical() {
    let a = run(&["verify", "thm4", "--count", "12", "--seed", "3"]);
    let b = run(&["verify", "thm4", "--count", "12", "--seed", "3"]);
    let c = run(&[
        "--jobs", "1", "verify", "thm4", "--count", "12", "--seed", "3",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"lattice": {"axes": [[0, 1]]}, "parameters": {"labels": 3}}"#,
    )
    .unwrap();
    let out = run(&["solve-static", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parameters.labels"), "{err}");
}

#[test]
fn missing_config_is_an_input_error() {
    let out = run(&["solve-static", "/nonexistent/config.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn counterexample_is_rejected_then_violated() {
    let cfg = config("gap_counterexample.json");
    let gated = run(&["lechatelier", cfg.to_str().unwrap()]);
    assert_eq!(code(&gated), 2);
    assert_eq!(json(&gated)["hypothesis"]["property"], "monotone");
    let forced = run(&[
        "lechatelier",
        cfg.to_str().unwrap(),
        "--unsafe-skip-hypotheses",
    ]);
    assert_eq!(code(&forced), 3);
    assert_eq!(json(&forced)["result"]["x_hat_optimal"], false);
}

#[test]
fn solve_static_writes_maximizers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("labor_supply.json");
    let out = run(&[
        "solve-static",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "holds");
    let csv = std::fs::read_to_string(dir.path().join("maximizers.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(
        header.starts_with("index,x1") && header.ends_with("value,selected"),
        "{header}"
    );
    assert!(csv.lines().skip(1).any(|l| l.ends_with(",true")));
}

#[test]
fn risk_flag_selects_the_lottery_variant() {
    let cfg = config("labor_supply.json");
    let out = run(&["solve-static", cfg.to_str().unwrap(), "--risk", "cara:0.01"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["theorem"], "thm1p");
    let bad = run(&["solve-static", cfg.to_str().unwrap(), "--risk", "log"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn dynamic_path_csv_uses_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("pricing.json");
    let out = lechat()
        .args(["solve-dynamic", cfg.to_str().unwrap(), "--verdict", "thm4"])
        .env("LECHAT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdicts"]["verdict"], "holds");
    let csv = std::fs::read_to_string(dir.path().join("path.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,x1,payoff,cost");
    let prices: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(prices.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn myopic_and_horizons_hold_on_pricing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("pricing.json");
    let d = dir.path().to_str().unwrap();
    for args in [
        vec![
            "solve-myopic",
            cfg.to_str().unwrap(),
            "--mode",
            "caged",
            "--out",
            d,
        ],
        vec!["compare-horizons", cfg.to_str().unwrap(), "--out", d],
    ] {
        let out = run(&args);
        assert_eq!(
            code(&out),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let csv = std::fs::read_to_string(dir.path().join("horizons.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,myopic_x1,forward_x1");
    for l in csv.lines().skip(1) {
        let v: Vec<f64> = l.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert!(v[0] <= v[1], "{l}");
    }
}

#[test]
fn demos_pass() {
    for m in [
        "pricing",
        "factor_demand",
        "labor_supply",
        "investment",
        "wishful",
    ] {
        let out = run(&["demo", m]);
        assert_eq!(code(&out), 0, "{m}");
        assert_eq!(json(&out)["passed"], true, "{m}");
    }
}

#[test]
fn shipped_configs_match_demo_output() {
    for m in [
        "pricing",
        "factor_demand",
        "labor_supply",
        "investment",
        "wishful",
    ] {
        let out = run(&["demo", m, "--print-config"]);
        let shipped = std::fs::read(config(&format!("{m}.json"))).unwrap();
        assert_eq!(out.stdout, shipped, "{m}");
    }
}

#[test]
fn fixtures_and_unknown_suites() {
    let out = run(&["verify", "fixtures"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["fixtures"].as_array().unwrap().len(), 3);
    assert_eq!(code(&run(&["verify", "thm99"])), 1);
}
