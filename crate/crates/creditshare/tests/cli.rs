use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use creditshare::run;
use serde_json::Value;
use tempfile::TempDir;

const P_OVER: &str = r#"{"n_agents":2,"lambda":1.0,"discount":1.0,"pi_s":1.0,"r_w":0.0,"r_l":0.0,"pi_w":4.0,"pi_l":0.0}"#;
const P_UNDER: &str = r#"{"n_agents":2,"lambda":1.0,"discount":1.0,"pi_s":1.0,"r_w":0.0,"r_l":0.0,"pi_w":3.0,"pi_l":2.0}"#;
const P_EFF: &str = r#"{"n_agents":2,"lambda":1.0,"discount":1.0,"pi_s":1.0,"r_w":0.0,"r_l":0.0,"pi_w":3.0,"pi_l":1.0}"#;
const P_BAD: &str = r#"{"n_agents":2,"lambda":1.0,"discount":1.0,"pi_s":1.0,"r_w":0.0,"r_l":0.0,"pi_w":1.0,"pi_l":0.5}"#;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn cli(args: &[&str]) -> (i32, String) {
    let argv = std::iter::once("creditshare").chain(args.iter().copied());
    let out = run(argv);
    (out.code, out.stdout)
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout).unwrap_or_else(|e| panic!("bad JSON {stdout:?}: {e}"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn thresholds_output_is_exact() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p_over.json", P_OVER);
    let (code, out) = cli(&["thresholds", "--params", s(&p)]);
    assert_eq!(code, 0);
    assert_eq!(out, "{\"p_fb\":0.5,\"p_indiv\":0.3333333333333333,\"p_cross\":0.25,\"regime\":\"Overcompetitive\"}\n");
}

#[test]
fn invalid_params_exit_2() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", P_BAD);
    let (code, out) = cli(&["validate", "--params", s(&p)]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["ok"], Value::Bool(false));
    let (code, _) = cli(&["thresholds", "--params", s(&p)]);
    assert_eq!(code, 2);
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let extra = P_EFF.replace("}", ",\"pi_x\":1.0}");
    let p = write(&dir, "extra.json", &extra);
    assert_eq!(cli(&["validate", "--params", s(&p)]).0, 2);
    let p = write(&dir, "eff.json", P_EFF);
    assert_eq!(cli(&["validate", "--params", s(&p), "--set", "bogus=1"]).0, 2);
}

#[test]
fn overrides_apply_before_validation() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "eff.json", P_EFF);
    let (code, out) = cli(&["classify", "--params", s(&p), "--set", "pi_l=2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["regime"], "Undercompetitive");
}

#[test]
fn contract_design_example() {
    let (code, out) = cli(&["contract", "design", "--r", "0", "--pi", "4", "--n", "2", "--pi-s", "1", "--fix", "alpha-i=1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["alpha_c"].as_f64().unwrap(), 0.5);
    assert_eq!(v["guarantee"].as_f64().unwrap(), 1.0);
}

#[test]
fn designed_contract_induces_efficient_game() {
    let dir = TempDir::new().unwrap();
    let (_, out) = cli(&["contract", "design", "--r", "1", "--pi", "5", "--n", "3", "--pi-s", "1", "--fix", "alpha-c=0.4", "--family", "effort"]);
    let v = json(&out);
    let contract = serde_json::json!({
        "family": v["family"], "alpha_i": v["alpha_i"], "alpha_c": v["alpha_c"],
    });
    let c = write(&dir, "c.json", &contract.to_string());
    let (code, game) = cli(&["contract", "induce", "--contract", s(&c), "--r", "1", "--pi", "5", "--n", "3", "--pi-s", "1"]);
    assert_eq!(code, 0, "{game}");
    let g = write(&dir, "g.json", &game);
    let (code, out) = cli(&["classify", "--params", s(&g)]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["regime"], "Efficient");
}

#[test]
fn thresholds_and_equilibrium_agree_on_regime() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [("over", P_OVER), ("under", P_UNDER), ("eff", P_EFF)] {
        let p = write(&dir, name, body);
        let (_, t) = cli(&["thresholds", "--params", s(&p)]);
        let regime = json(&t)["regime"].clone();
        let (code, e) = cli(&["equilibrium", "--params", s(&p)]);
        assert_eq!(code, 0);
        assert_eq!(json(&e)["regime"], regime, "{name}");
    }
}

#[test]
fn equilibrium_values() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "under.json", P_UNDER);
    let v = json(&cli(&["equilibrium", "--params", s(&p), "--p", "0.6"]).1);
    assert_eq!(v["c_star"].as_f64().unwrap(), -2.0);
    assert!((v["p_stop"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let p = write(&dir, "over.json", P_OVER);
    let v = json(&cli(&["equilibrium", "--params", s(&p), "--p-t", "0.3", "--p", "0.5"]).1);
    assert!((v["value"].as_f64().unwrap() - 0.9472325).abs() < 1e-6);
}

#[test]
fn precondition_and_regime_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "over.json", P_OVER);
    assert_eq!(cli(&["equilibrium", "--params", s(&p), "--p", "0.5"]).0, 4);
    assert_eq!(cli(&["curves", "under", "--params", s(&p), "--points", "3"]).0, 4);
    assert_eq!(cli(&["equilibrium", "--params", s(&p), "--p-t", "0.9"]).0, 4);
}

#[test]
fn usage_and_io_errors_exit_1() {
    assert_eq!(cli(&["frobnicate"]).0, 1);
    assert_eq!(cli(&["thresholds", "--params", "/nonexistent/params.json"]).0, 1);
    assert_eq!(cli(&["contract", "design", "--r", "0", "--pi", "4", "--n", "2", "--pi-s", "1", "--fix", "beta=1"]).0, 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "under.json", P_UNDER);
    let sim = ["simulate", "--params", s(&p), "--p0", "0.6", "--profile", "equilibrium", "--reps", "500", "--seed", "11"];
    let a = cli(&sim);
    assert_eq!(a.0, 0);
    assert_eq!(a, cli(&sim));
    let other_seed = ["simulate", "--params", s(&p), "--p0", "0.6", "--profile", "equilibrium", "--reps", "500", "--seed", "12"];
    assert_ne!(a.1, cli(&other_seed).1);
    let curves = ["curves", "level", "--params", s(&p), "--points", "11"];
    assert_eq!(cli(&curves), cli(&curves));
}

#[test]
fn simulation_dump_has_one_row_per_replication() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "eff.json", P_EFF);
    let dump = dir.path().join("dump.csv");
    let (code, _) = cli(&["simulate", "--params", s(&p), "--p0", "0.7", "--profile", "first-best", "--reps", "50", "--dump", s(&dump)]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.starts_with("rep,tau,winner,payoff_1,payoff_2"));
}

#[test]
fn curves_default_grid() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "over.json", P_OVER);
    let (code, out) = cli(&["curves", "over", "--params", s(&p)]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[0].split(',').count(), 4);
    assert!(lines[1].starts_with("0.001,"));
    assert!(lines[1001].starts_with("0.999,"));
}

#[test]
fn oracle_writes_table_and_verifies() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "eff.json", P_EFF);
    let out = dir.path().join("table.csv");
    let (code, summary) = cli(&["oracle", "first-best", "--params", s(&p), "--grid", "201", "--out", s(&out)]);
    assert_eq!(code, 0);
    assert!((json(&summary)["switch_belief"].as_f64().unwrap() - 0.5).abs() <= 1.01 / 200.0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 202);
    let (code, v) = cli(&["oracle", "verify", "--params", s(&p), "--profile", "first-best", "--grid", "201"]);
    assert_eq!(code, 0);
    assert_eq!(json(&v)["pass"], Value::Bool(true));
}

#[test]
fn hetero_reduces_to_symmetric_case() {
    let dir = TempDir::new().unwrap();
    let h = r#"{"mu":[1.0,1.0],"lambda":1.0,"discount":1.0,"pi_s":1.0,"r_l":[0.0,0.0],"pi_l":[1.0,1.0],"r_total":0.0,"pi_total":4.0}"#;
    let p = write(&dir, "h.json", h);
    let (code, out) = cli(&["hetero", "classify", "--params", s(&p)]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["efficient"], Value::Bool(true));
    assert!((v["p_fb"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn binary_reports_errors_on_stderr() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.json", P_BAD);
    let out = Command::new(env!("CARGO_BIN_EXE_creditshare"))
        .args(["thresholds", "--params", s(&p)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid parameters"));
}
