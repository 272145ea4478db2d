use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sfcavail"))
}

fn vims() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/vims.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_reports_acceptable_terms() {
    let v = vims();
    let o = run(&["analyze", v.to_str().unwrap(), "-l", "2,3,3,3,3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("(2,3,3,3,3)"));
    assert!(s.contains("(40000, 60000)           9.8701e-1"), "{s}");
    assert!(s.contains("(40000, 50000)           5.688"), "{s}");
    assert!(s.contains("unavailability     9.34"), "{s}");
}

#[test]
fn analyze_defaults_to_single_nodes() {
    let v = vims();
    let o = run(&["analyze", v.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["config"], serde_json::json!([1, 1, 1, 1, 1]));
    assert_eq!(j["cost"], 5.0);
}

#[test]
fn malformed_rate_unit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(vims()).unwrap().replacen("per_second", "per_week", 1);
    std::fs::write(&path, text).unwrap();
    let o = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line") && err.contains("per_week"), "{err}");
}

#[test]
fn optimize_json_lists_five_optima() {
    let v = vims();
    let o = run(&["optimize", v.to_str().unwrap(), "--A0", "0.99999", "--format", "json"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["status"], "optimal");
    assert_eq!(j["min_cost"], 14.0);
    assert_eq!(j["optima"].as_array().unwrap().len(), 5);
}

#[test]
fn infeasible_optimization_exits_3() {
    let v = vims();
    let o = run(&["optimize", v.to_str().unwrap(), "--A0", "0.9999999", "--max-redundancy", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("INFEASIBLE"));
}

#[test]
fn optimize_csv_has_full_precision() {
    let v = vims();
    let o = run(&["optimize", v.to_str().unwrap(), "--format", "csv"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("l,cost,availability,unavailability,feasible"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1 1 1 1 1");
    let digits = row[2].trim_start_matches("0.").trim_start_matches('0').len();
    assert!(digits >= 10, "{}", row[2]);
    assert_eq!(s.lines().count(), 1 + 1024);
}

#[test]
fn sweep_crosses_target_near_105_minutes() {
    let v = vims();
    let o = run(&["sweep", v.to_str().unwrap(), "--param", "mu_v", "--range", "60:180", "--points", "61", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let rows: Vec<(f64, f64)> = s
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f[0], "mu_v");
            assert_eq!(f[3], "minutes");
            (f[2].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 61);
    let crossing = rows.windows(2).find(|w| (w[0].1 < 1e-5) != (w[1].1 < 1e-5)).expect("crossing");
    let minutes = 0.5 * (crossing[0].0 + crossing[1].0);
    assert!((95.0..120.0).contains(&minutes), "{minutes}");
}

#[test]
fn simulate_is_deterministic() {
    let v = vims();
    let args = [
        "simulate", v.to_str().unwrap(), "--seed", "1", "--seed", "1", "--horizon", "1e7", "--replications", "4", "--format", "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let j: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    for key in ["mean", "std_error", "replications", "horizon", "seed"] {
        assert!(j.get(key).is_some(), "{key}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let v = vims();
    let o = run(&["threshold", v.to_str().unwrap(), "--param", "lambda_h", "-l", "2,3,3,3,3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(j[0]["parameter"], "lambda_h");
    assert_eq!(j[0]["unit"], "hours");
}

#[test]
fn demand_sweep_reports_rows() {
    let v = vims();
    let o = run(&["demand-sweep", v.to_str().unwrap(), "--demand", "10000,20000", "--demand", "20000,20000"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("w = (10000, 20000)   cost 10"), "{s}");
    assert!(s.contains("w = (20000, 20000)   cost 13"), "{s}");
}
