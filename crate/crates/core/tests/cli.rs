use std::fs;
use std::path::Path;
use std::process::Command;

use ndtrace::cli::{main_with_args, RunConfig, SummaryEntry, ZGrid};
use ndtrace::C64;

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(cmd: &str, config: &str, out: &Path) -> i32 {
    main_with_args(["ndtrace", cmd, "--config", config, "--out", out.to_str().unwrap(), "--threads", "1"])
}

fn summary(out: &Path) -> Vec<SummaryEntry> {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

const SECH2: &str = r#"{
  "schema_version": 1,
  "order": 2,
  "coefficients": {"name": "sech2", "lambda": -2.0},
  "z": {"kind": "points", "points": [-4.0, [0.5, 1.0]]}
}"#;

#[test]
fn roots_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SECH2);
    assert_eq!(run("roots", &cfg, dir.path()), 0);
    let mut rd = csv::Reader::from_path(dir.path().join("roots.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["z", "n", "root_0", "root_1", "truncation_estimate"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "-4e0+0e0i");
    assert_eq!(&rows[0][2], "2e0+0e0i");
    assert!(summary(dir.path()).is_empty());
}

#[test]
fn trace_check_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SECH2);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("trace-check", &cfg, &a), 0);
    assert_eq!(run("trace-check", &cfg, &b), 0);
    let s = summary(&a);
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].identity, "trace_formula");
    assert_eq!(s[0].n_points, 2);
    assert!(s[0].pass && s[0].max_rel_err < 1e-5);
    assert_eq!(fs::read(a.join("trace-check.csv")).unwrap(), fs::read(b.join("trace-check.csv")).unwrap());
}

#[test]
fn tolerance_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = SECH2.replace("\"order\": 2,", "\"order\": 2, \"tolerances\": {\"trace\": 1e-30},");
    let cfg = write_config(dir.path(), &body);
    assert_eq!(run("trace-check", &cfg, dir.path()), 1);
    assert!(!summary(dir.path())[0].pass);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        SECH2.replace("\"order\": 2,", "\"order\": 2, \"bogus\": 1,"),
        SECH2.replace("\"schema_version\": 1", "\"schema_version\": 7"),
        SECH2.replace("[-4.0, [0.5, 1.0]]", "[1.0]"),
        SECH2.replace("\"lambda\": -2.0", "\"lambda\": -2.0, \"extra\": 0"),
        "not json".to_string(),
    ];
    for body in cases {
        let cfg = write_config(dir.path(), &body);
        assert_eq!(run("trace-check", &cfg, dir.path()), 2, "{body}");
    }
    assert_eq!(main_with_args(["ndtrace", "roots"]), 2);
    assert_eq!(main_with_args(["ndtrace", "no-such-command"]), 2);
    let cfg = write_config(dir.path(), SECH2);
    assert_eq!(run("eig-count", &cfg, dir.path()), 2);
}

#[test]
fn run_executes_listed_commands() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
      "schema_version": 1,
      "order": 2,
      "coefficients": {"name": "sech2", "lambda": -2.0},
      "z": {"kind": "points", "points": [-4.0]},
      "x_points": [-1.0, 0.0, 2.0],
      "commands": ["roots", "wronskian", "jost-dump", "det-check"]
    }"#;
    let cfg = write_config(dir.path(), body);
    assert_eq!(run("run", &cfg, dir.path()), 0);
    for stem in ["roots", "wronskian", "jost-dump", "det-check"] {
        assert!(dir.path().join(format!("{stem}.csv")).exists());
    }
    let s = summary(dir.path());
    let ids: Vec<&str> = s.iter().map(|e| e.identity.as_str()).collect();
    assert_eq!(ids, ["wronskian_x_law", "det_identity"]);
    let dump = fs::read_to_string(dir.path().join("jost-dump.csv")).unwrap();
    // two solutions at three points plus the header
    assert_eq!(dump.lines().count(), 7);
}

#[test]
fn eig_count_with_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
      "schema_version": 1,
      "order": 2,
      "coefficients": {"name": "sech2", "lambda": -2.0},
      "contours": [{"center": -1.0, "radius": 0.5, "expected": 1}, {"center": [-1.0, 2.0], "radius": 0.5, "expected": 0}]
    }"#;
    let cfg = write_config(dir.path(), body);
    assert_eq!(run("eig-count", &cfg, dir.path()), 0);
    let wrong = body.replace("\"expected\": 1", "\"expected\": 2");
    let cfg = write_config(dir.path(), &wrong);
    assert_eq!(run("eig-count", &cfg, dir.path()), 1);
}

#[test]
fn coefficient_tables_are_read_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f64> = (0..81).map(|k| -2.0 + 0.05 * k as f64).collect();
    let re: Vec<f64> = x.iter().map(|t| -(1.0 - t * t / 4.0).powi(4)).collect();
    let table = serde_json::json!([{ "x": x, "re": re }]);
    fs::write(dir.path().join("v.json"), table.to_string()).unwrap();
    let body = r#"{
      "schema_version": 1,
      "order": 2,
      "coefficient_table": "v.json",
      "z": {"kind": "points", "points": [[-1.0, 0.5]]}
    }"#;
    let cfg = write_config(dir.path(), body);
    assert_eq!(run("wronskian", &cfg, &dir.path().join("out")), 0);
    let both = body.replace("\"order\": 2,", "\"order\": 2, \"coefficients\": {\"name\": \"zero\"},");
    let cfg = write_config(dir.path(), &both);
    assert_eq!(run("wronskian", &cfg, dir.path()), 2);
}

#[test]
fn z_grids_expand() {
    let rect: ZGrid = serde_json::from_str(r#"{"kind": "rectangle", "re": [-2.0, 2.0], "im": [1.0, 2.0], "n_re": 5, "n_im": 3}"#).unwrap();
    let pts = rect.points().unwrap();
    assert_eq!(pts.len(), 15);
    assert_eq!(pts[0], C64::new(-2.0, 1.0));
    assert_eq!(pts[14], C64::new(2.0, 2.0));
    let ray: ZGrid = serde_json::from_str(r#"{"kind": "ray", "direction": [0.0, 3.0], "magnitudes": [1.0, 10.0]}"#).unwrap();
    assert_eq!(ray.points().unwrap(), vec![C64::new(0.0, 1.0), C64::new(0.0, 10.0)]);
    let contour: ZGrid = serde_json::from_str(r#"{"kind": "contour", "center": -1.0, "radius": 0.5, "count": 4}"#).unwrap();
    let p = contour.points().unwrap();
    assert!((p[1] - C64::new(-1.0, 0.5)).norm() < 1e-15);
    assert!(RunConfig::from_json(SECH2).unwrap().validate().is_ok());
}

#[test]
fn binary_reports_help_and_version() {
    let exe = env!("CARGO_BIN_EXE_ndtrace");
    let help = Command::new(exe).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for cmd in ["roots", "jost-dump", "wronskian", "trace-check", "det-check", "eig-count", "large-z", "run"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    assert!(Command::new(exe).arg("--version").output().unwrap().status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SECH2);
    let st = Command::new(exe).args(["roots", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
}
