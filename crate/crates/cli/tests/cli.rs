use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sbm-sdp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn without_timestamp(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with("# created_unix")).collect::<Vec<_>>().join("\n")
}

#[test]
fn bounds_reports_closed_form() {
    let o = run(&["bounds", "--r", "3", "--s", "2", "--m", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(value(&text, "bound_coeff "), "8");
    assert_eq!(value(&text, "overall_coeff "), "8");
}

#[test]
fn bounds_rejects_bad_parameters() {
    let o = run(&["bounds", "--r", "2", "--s", "3", "--m", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sdp_of_diagonal_is_trace() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("d.txt");
    fs::write(&m, "# diagonal\n3\n1 0 0\n0 -2 0\n0 0 4.5\n").unwrap();
    let o = run(&["sdp", m.to_str().unwrap()]);
    assert!(o.status.success());
    let obj: f64 = value(&stdout(&o), "objective ").parse().unwrap();
    assert!((obj - 3.5).abs() < 1e-12);
}

#[test]
fn malformed_matrix_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("bad.txt");
    fs::write(&m, "2\n1 2\n3 1\n").unwrap();
    assert_eq!(run(&["sdp", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"kind":"estimate-k","replicates":0}"#).unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));
}

#[test]
fn simulate_is_seeded() {
    let a = run(&["simulate", "--n", "12", "--k", "3", "--rho", "0.5", "--mu-in", "2", "--mu-out", "0", "--seed", "4"]);
    let b = run(&["simulate", "--n", "12", "--k", "3", "--rho", "0.5", "--mu-in", "2", "--mu-out", "0", "--seed", "4"]);
    let c = run(&["simulate", "--n", "12", "--k", "3", "--rho", "0.5", "--mu-in", "2", "--mu-out", "0", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.json");
    fs::write(
        &cfg,
        r#"{"kind":"test-power","model":{"n":20,"k":2,"rho":0.8,"mu_in":4,"mu_out":1},
            "grid":{"mu_gap":[1,3]},"replicates":2,"base_seed":11}"#,
    )
    .unwrap();
    let outputs: Vec<_> = [("1", "a.csv"), ("3", "b.csv")]
        .iter()
        .map(|(workers, name)| {
            let out = dir.path().join(name);
            let o = bin()
                .env("SBM_SDP_WORKERS", workers)
                .args(["run", "--sorted", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let a = without_timestamp(&outputs[0]);
    assert_eq!(a, without_timestamp(&outputs[1]));
    assert!(a.contains("# config_sha256="));
    // Two grid points, two replicates, six metrics each.
    assert_eq!(a.lines().filter(|l| l.starts_with("test-power,")).count(), 24);
    let summary = fs::read_to_string(dir.path().join("a.summary.csv")).unwrap();
    assert!(summary.lines().any(|l| l.contains(",reject_below,2,")));
}
