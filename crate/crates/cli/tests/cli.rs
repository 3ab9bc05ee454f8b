use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_momentum-lab"));
    c.env_remove("MOMENTUM_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn lemma212_passes_and_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["lemma212", "--trials", "200", "--dim-max", "10", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let first = std::fs::read(&out).unwrap();
    let o = run(&["lemma212", "--trials", "200", "--dim-max", "10", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(first, std::fs::read(&out).unwrap());
    let v = read_json(&out);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "config", "pass", "results", "version"]);
    assert_eq!(v["command"], "lemma212");
    assert_eq!(v["results"]["inconsistencies"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["lemma212", "--trials", "0"])), 2);
    assert_eq!(code(&run(&["lemma212", "--dim-max", "7"])), 2);
    assert_eq!(code(&run(&["kostant", "--family", "sl9z", "--Y", "1"])), 2);
    assert_eq!(code(&run(&["kostant", "--family", "sl2r"])), 2);
    assert_eq!(code(&run(&["kostant", "--family", "sl3r", "--Y", "1,1,1"])), 2);
    assert_eq!(code(&run(&["kostant", "--family", "sl2r", "--Y", "1", "--samples", "3"])), 2);
    assert_eq!(code(&run(&["leaf-check", "--family", "sl2c"])), 2);
    assert_eq!(code(&run(&["leaf-check", "--family", "sl2r", "--a", "1"])), 2);
    assert_eq!(code(&run(&["kostant", "--seed", "minus-one"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&bin().args(["lemma212"]).env("MOMENTUM_LAB_SEED", "abc").output().unwrap()), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn kostant_rank_one_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    let o = run(&["kostant", "--family", "sl2r", "--Y", "1", "--samples", "10000", "--seed", "7", "--points-csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1"));
    let vals: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals.len(), 10_000);
    assert!(vals.iter().all(|v| v.abs() <= 1.0 + 1e-9));
}

#[test]
fn kostant_rank_two_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hex.csv");
    let o = run(&["kostant", "--family", "sl3r", "--Y", "1,0,-1", "--samples", "200000", "--points-csv", csv.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["results"]["orbit"].as_array().unwrap().len(), 6);
    assert_eq!(v["results"]["vertex_errors"].as_object().unwrap().len(), 6);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x1,x2\n"));
}

#[test]
fn kostant_failure_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    // 10 samples cannot cover the interval to within 1e-4
    let o = run(&["kostant", "--family", "sl2r", "--Y", "1", "--samples", "10", "--gap-max", "1e-4", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = read_json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["results"]["coverage_max_gap"].as_f64().unwrap() > 1e-4);
}

#[test]
fn example_prints_omega_and_detects_perturbation() {
    let o = run(&["example-so14"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("omega = 2.000000000"), "{s}");
    assert!(s.contains("Ad(n)^-1 X =") && s.contains("pr_u(Ad(n)^-1 X) ="));
    assert_eq!(code(&run(&["example-so14", "--perturb-n", "1e-3"])), 1);
}

#[test]
fn leaf_checks() {
    let o = run(&["leaf-check", "--family", "sl2c", "--a", "0.7", "--samples", "100"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["leaf-check", "--family", "so5c", "--a", "0.5", "--samples", "50", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["results"]["antisymplectic_probe"].as_f64().unwrap() > 0.1);
    assert!(v["results"]["lagrangian_residual"].as_f64().unwrap() <= 1e-8);
    // diagonal entries are accepted for SL families
    let o = run(&["leaf-check", "--family", "sl2c", "--a", "0.7,-0.7", "--samples", "20", "--json"]);
    assert_eq!(code(&o), 0);
    assert!((json(&o)["results"]["log_a"][0].as_f64().unwrap() - 0.7).abs() < 1e-12);
}

#[test]
fn suites_run() {
    assert_eq!(code(&run(&["cone-suite", "--trials", "20"])), 0);
    assert_eq!(code(&run(&["localmodel-suite", "--trials", "10", "--planted", "5"])), 0);
}

#[test]
fn seed_precedence() {
    let flag = json(&run(&["cone-suite", "--trials", "5", "--seed", "42", "--json"]));
    let env = json(&bin().args(["cone-suite", "--trials", "5", "--json"]).env("MOMENTUM_LAB_SEED", "42").output().unwrap());
    assert_eq!(flag, env);
    let both = json(&bin().args(["cone-suite", "--trials", "5", "--seed", "3", "--json"]).env("MOMENTUM_LAB_SEED", "42").output().unwrap());
    assert_eq!(both["config"]["seed"], 3);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 17\nfamily = \"sl2r\"\nY = [1.0]\nsamples = 500\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&run(&["kostant", "--config", c, "--json"]));
    assert_eq!(v["config"]["seed"], 17);
    assert_eq!(v["results"]["n_samples"], 500);
    let v = json(&bin().args(["kostant", "--config", c, "--json"]).env("MOMENTUM_LAB_SEED", "8").output().unwrap());
    assert_eq!(v["config"]["seed"], 8);
    let v = json(&run(&["kostant", "--config", c, "--samples", "600", "--seed", "2", "--json"]));
    assert_eq!((v["config"]["seed"].as_u64(), v["results"]["n_samples"].as_u64()), (Some(2), Some(600)));
}

#[test]
fn full_battery() {
    let o = run(&["all", "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["results"].as_object().unwrap().len(), 10);
    assert_eq!(v["pass"], true);
}
