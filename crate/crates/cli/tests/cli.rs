use std::path::Path;
use std::process::{Command, Output};

use mixturecraft::Mixture;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mixturecraft"));
    cmd.env_remove("MIXTURECRAFT_QUAD_ORDER");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn approximate_args<'a>(mix: &'a str, rep: &'a str) -> Vec<&'a str> {
    vec![
        "approximate", "--target", "gaussian:0,1", "--kernel", "gaussian:0,1", "--mode", "uniform", "--K", "-3,3",
        "--eps", "0.05", "--out", mix, "--report", rep,
    ]
}

#[test]
fn approximate_writes_mixture_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (mix, rep) = (path(dir.path(), "mix.json"), path(dir.path(), "rep.json"));
    let out = run(&approximate_args(&mix, &rep));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = Mixture::from_json(&std::fs::read(&mix).unwrap()).unwrap();
    assert!((parsed.weight_sum() - 1.0).abs() <= 1e-12);
    let report: Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(report["mode"], "uniform");
    assert!(report["measured_total"].as_f64().unwrap() <= 0.05);
    assert_eq!(report["params"]["m"].as_u64().unwrap() as usize, parsed.len());
    for key in ["c_m", "k_m", "certified_bound", "measured_mollification", "elapsed_s"] {
        assert!(report.get(key).is_some(), "{key}");
    }
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let (mix, rep) = (path(dir.path(), &format!("m{run_id}.json")), path(dir.path(), &format!("r{run_id}.json")));
        let mut args = approximate_args(&mix, &rep);
        args.push("--no-timing");
        assert_eq!(run(&args).status.code(), Some(0));
        outputs.push((std::fs::read(&mix).unwrap(), std::fs::read(&rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn lp_mode() {
    let dir = tempfile::tempdir().unwrap();
    let (mix, rep) = (path(dir.path(), "mix.json"), path(dir.path(), "rep.json"));
    let out = run(&[
        "approximate", "--target", "gaussian:0,1", "--kernel", "gaussian:0,1", "--mode", "lp", "--p", "1", "--eps", "2",
        "--out", &mix, "--report", &rep,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(report["mode"], "lp");
    assert_eq!(report["params"]["p"], 1.0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (mix, rep) = (path(dir.path(), "mix.json"), path(dir.path(), "rep.json"));
    let mut args = approximate_args(&mix, &rep);
    args[10] = "-1";
    let out = run(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));
    assert!(!Path::new(&mix).exists());

    let out = run(&["approximate", "--target", "gaussian:0,1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["eval", "--mixture", &mix, "--at", "zero"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["young-check", "--f", "nosuch:1", "--g", "gaussian:0,1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--f"));

    let out = bin()
        .env("MIXTURECRAFT_QUAD_ORDER", "1")
        .args(["sweep", "--target", "gaussian:0,1", "--kernel", "gaussian:0,1", "--K", "-3,3", "--settings", "4:0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MIXTURECRAFT_QUAD_ORDER"));
}

#[test]
fn runtime_errors_exit_one_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let (mix, rep) = (path(dir.path(), "mix.json"), path(dir.path(), "rep.json"));
    let mut args = approximate_args(&mix, &rep);
    args[10] = "0.001";
    args.extend(["--max-components", "10"]);
    let out = run(&args);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "BudgetExceeded");
    assert!(err["delta"].as_f64().unwrap() > 0.0);
    assert!(!Path::new(&mix).exists());
}

#[test]
fn eval_prints_the_value() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("single.json");
    std::fs::write(
        &file,
        r#"{"dim": 1, "kernel": {"family": "gaussian", "params": [0, 1]},
            "components": [{"w": "1", "mu": ["0"], "sigma": "1"}]}"#,
    )
    .unwrap();
    let out = run(&["eval", "--mixture", file.to_str().unwrap(), "--at", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("0.3989422804"), "{text}");
    let v: f64 = text.trim().parse().unwrap();
    assert_eq!(v, 1.0 / (2.0 * std::f64::consts::PI).sqrt());

    let out = run(&["eval", "--mixture", file.to_str().unwrap(), "--at", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "DimensionError");
}

#[test]
fn sweep_and_identity_curve_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "sweep.csv");
    let out = run(&[
        "sweep", "--target", "gaussian:0,1", "--kernel", "gaussian:0,1", "--K", "-3,3", "--settings", "4:0.4,4:0.2,4:0.1",
        "--out", &table, "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&table).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,delta,certified_bound,measured_sup,measured_lp,m,elapsed_s"));
    let bounds: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(bounds.len(), 3);
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
    assert!(!text.contains('\r'));

    let out = run(&["identity-curve", "--target", "gaussian:0,1", "--kernel", "gaussian:0,1", "--K", "-3,3", "--ks", "1,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,certified_bound,measured_sup,measured_lp,m,elapsed_s\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn young_check_prints_json() {
    let out = run(&["young-check", "--f", "gaussian:0,1", "--g", "laplace:0,1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert!(v["lhs"].as_f64().unwrap() < v["rhs"].as_f64().unwrap());
}
