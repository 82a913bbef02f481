use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_negdep-qmc");

fn run(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{sub}.json"));
    std::fs::write(&cfg, config).unwrap();
    Command::new(BIN)
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .args(extra)
        .env_remove("NEGDEP_QMC_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV table as maps from column name to value.
fn table(text: &str) -> Vec<std::collections::BTreeMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            header.iter().cloned().zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn sample_is_replayable() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"scheme": {"scheme": "latin_hypercube"}, "n": 8, "d": 2, "seed": 42}"#;
    let a = run(dir.path(), "sample", cfg, &[]);
    let b = run(dir.path(), "sample", cfg, &["--threads", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("2 8"));
    assert_eq!(lines.count(), 8);
    let c = run(dir.path(), "sample", cfg, &["--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sample_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("points.txt");
    let cfg = r#"{"scheme": {"scheme": "monte_carlo"}, "n": 3, "d": 1}"#;
    let o = run(dir.path(), "sample", cfg, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("1 3\n"));
}

#[test]
fn rsj_needs_prime() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "sample", r#"{"scheme": {"scheme": "rsj_rank1_lattice"}, "n": 6, "d": 2}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N must be prime"));
}

#[test]
fn mixed_sample_shape() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"scheme": {"scheme": "mixed", "left": {"scheme": "latin_hypercube"}, "d_left": 2,
                  "right": {"scheme": "monte_carlo"}, "d_right": 3}, "n": 16, "d": 5}"#;
    let o = run(dir.path(), "sample", cfg, &[]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("5 16\n"));
    assert!(text.lines().skip(1).all(|l| l.split_whitespace().count() == 5));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "sample", r#"{"scheme": {"scheme": "monte_carlo"}, "n": 3, "d": 1, "colour": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), "sample", r#"{"scheme": {"scheme": "monte_carlo", "n": 3}, "n": 3, "d": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN).arg("bounds").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn discrepancy_of_centered_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"points": {"kind": "inline", "dim": 1, "rows": [[0.125], [0.375], [0.625], [0.875]]}}"#;
    let o = run(dir.path(), "discrepancy", cfg, &["--delta", "0.05"]);
    assert!(o.status.success());
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let exact = num(&rows[0]["star_exact"]);
    assert!((exact - 0.125).abs() < 1e-15);
    let lower = num(&rows[0]["cover_lower"]);
    assert!(lower <= exact && exact <= lower + 0.05);
}

#[test]
fn discrepancy_from_file_with_schema() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("p.txt");
    std::fs::write(&pts, "2 2\n0.25 0.75\n0.75 0.25\n").unwrap();
    let out = dir.path().join("d.csv");
    let cfg = format!(
        r#"{{"points": {{"kind": "file", "path": {:?}}},
            "weights": {{"kind": "product", "gamma": [1.0, 0.5]}}}}"#,
        pts.to_str().unwrap()
    );
    let o = run(dir.path(), "discrepancy", &cfg, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = table(&std::fs::read_to_string(&out).unwrap());
    // each 1-d projection is {0.25, 0.75} with discrepancy 0.25
    let d01 = num(&rows[0]["star_exact"]);
    let weighted = num(&rows[0]["weighted"]);
    let expect = [0.25, 0.5 * 0.25, 0.5 * d01].into_iter().fold(0.0, f64::max);
    assert!((weighted - expect).abs() < 1e-15);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.csv.schema.json")).unwrap()).unwrap();
    assert_eq!(schema["subcommand"], "discrepancy");
    assert_eq!(schema["columns"].as_array().unwrap().len(), rows[0].len());
}

#[test]
fn discrepancy_budget_exit_code() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"points": {"kind": "scheme", "scheme": {"scheme": "monte_carlo"}, "n": 64, "d": 3},
                  "work_cap": 10}"#;
    let o = run(dir.path(), "discrepancy", cfg, &[]);
    assert_eq!(o.status.code(), Some(3));
}

const MIN_COPULA_SWEEP: &str = r#"{"scheme": {"scheme": "min_copula"}, "n": 2, "d": 1, "replications": 1000,
    "tests": [{"notion": "pairwise_nd", "corners": [[0.25], [0.5], [0.75]]}]}"#;

#[test]
fn min_copula_sweep_finds_violation() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "negdep", MIN_COPULA_SWEEP, &[]);
    assert!(o.status.success());
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 18);
    assert!(rows.iter().any(|r| r["verdict"] == "violated"));
    assert!(rows.iter().all(|r| r["exact"] == "true"));
    let o = run(dir.path(), "negdep", MIN_COPULA_SWEEP, &["--expect-holds"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn lhs_sweep_with_oracle() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"scheme": {"scheme": "latin_hypercube"}, "n": 6, "d": 2, "replications": 20000,
        "tests": [{"notion": "upper_nd", "boxes": [{"a": [0, 0], "b": [0.5, 0.5]}, {"a": [0, 0], "b": [0.3, 0.8]}],
                   "t": [2, 3]}]}"#;
    let o = run(dir.path(), "negdep", cfg, &["--oracle", "--expect-holds"]);
    assert!(o.status.success());
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let (lhs, hw, oracle) = (num(&r["lhs"]), num(&r["ci_halfwidth"]), num(&r["oracle"]));
        assert!((lhs - oracle).abs() <= 2.0 * hw, "{r:?}");
        assert!(oracle <= num(&r["rhs"]));
    }
}

#[test]
fn mc_sweep_never_violates() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"scheme": {"scheme": "monte_carlo"}, "n": 4, "d": 2, "replications": 5000,
        "tests": [{"notion": "upper_nd", "boxes": [{"a": [0, 0], "b": [0.5, 0.5]}], "t": [2, 4]},
                  {"notion": "lower_nd", "boxes": [{"a": [0.2, 0.2], "b": [0.7, 0.9]}], "t": [2]},
                  {"notion": "pairwise_nd", "corners": [[0.3, 0.3], [0.6, 0.2]]},
                  {"notion": "ci_nqd", "coord": 1, "thresholds": [0.3, 0.7]},
                  {"notion": "conditional_nqd", "coord": 1, "a": [{"a": [0], "b": [0.5]}],
                   "b": [{"a": [0.5], "b": [1]}], "thresholds": [0.5]}]}"#;
    let a = run(dir.path(), "negdep", cfg, &["--expect-holds"]);
    assert!(a.status.success());
    let rows = table(&stdout(&a));
    assert_eq!(rows.len(), 2 + 1 + 8 + 4 + 1);
    assert!(rows.iter().all(|r| r["verdict"] != "violated"));
    let b = run(dir.path(), "negdep", cfg, &["--threads", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bounds_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"grid": {"n": [3, 100, 10000], "d": [3], "theta": [0.5, 0.9], "c": [0.5, 5.0]}}"#;
    let o = run(dir.path(), "bounds", cfg, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 3 * 2 * 2);
    for r in &rows {
        let (gh, mixed) = (num(&r["gh_theta"]), num(&r["gh_theta_mixed"]));
        assert!((mixed - 2.0 * gh).abs() <= 1e-15 * mixed);
        assert_eq!(r["vacuous"] == "true", r["c"] == "0.5");
        if r["n"] == "3" {
            assert!((num(&r["eta"]) - 6.0 * std::f64::consts::E).abs() < 1e-12);
        }
    }
    let o = run(dir.path(), "bounds", r#"{"grid": {"n": [10], "d": [2], "theta": [1.0]}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn variance_study_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"replications": 400, "studies": [
        {"scheme": {"scheme": "latin_hypercube"}, "function": {"kind": "product_coords"}, "n": 16, "d": 2},
        {"scheme": {"scheme": "monte_carlo"}, "function": {"kind": "corner_indicator", "a": [0.5, 0.5]}, "n": 16, "d": 2}]}"#;
    let o = run(dir.path(), "variance", cfg, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!(num(&rows[0]["ratio"]) < 0.5);
    assert_eq!(rows[0]["no_worse_than_mc"], "true");
    let o = run(dir.path(), "variance", &cfg.replace("400", "10"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn net_check() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "net-check", r#"{"base": 3, "m": 2, "s": 2, "scrambles": 3}"#, &[]);
    assert!(o.status.success());
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["is_net"] == "true"));
    let cfg = r#"{"base": 2, "m": 2, "s": 2,
        "points": {"kind": "inline", "dim": 2, "rows": [[0.1, 0.1], [0.2, 0.2], [0.6, 0.6], [0.7, 0.7]]}}"#;
    let o = run(dir.path(), "net-check", cfg, &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn report_subset() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bundle");
    let o = run(dir.path(), "report", r#"{"criteria": [1, 4]}"#, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["criteria"].as_array().unwrap().len(), 2);
    assert!(std::fs::read_dir(&out).unwrap().count() > 1);
    let o = run(dir.path(), "report", r#"{"criteria": [13]}"#, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
