use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nctheta"));
    cmd.env_remove("NCTHETA_TOL");
    cmd
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn diag_weight(d: &[f64]) -> String {
    let n = d.len();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let row: Vec<String> = (0..n).map(|j| format!("[{},0]", if i == j { d[i] } else { 0.0 })).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    format!(r#"{{"dim":{n},"matrix":[{}]}}"#, rows.join(","))
}

const C5: &str = r#"{"dim":5,"classical_adjacency":[[0,1,0,0,1],[1,0,1,0,0],[0,1,0,1,0],[0,0,1,0,1],[1,0,0,1,0]]}"#;

/// `S = {[[a, b], [c, a]]}`: span of I, E12, E21.
const TWO_BY_TWO: &str = r#"{"dim":2,"basis":[
    [[[1,0],[0,0]],[[0,0],[1,0]]],
    [[[0,0],[1,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[1,0],[0,0]]]
]}"#;

fn json_stdout(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad stdout {text:?}: {e}"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn compute_c5_identity() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", C5);
    let w = write(&dir, "w.json", &diag_weight(&[1.0; 5]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert!((v["value"].as_f64().unwrap() - 2.236068).abs() < 1e-5);
    assert_eq!(v["form"], "min_Y");
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 5);
}

#[test]
fn result_field_order_is_fixed() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", C5);
    let w = write(&dir, "w.json", &diag_weight(&[1.0; 5]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--form", "max_T"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let pos: Vec<usize> =
        ["\"value\"", "\"gap\"", "\"form\"", "\"primal\"", "\"dual\""].iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn missing_identity_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"dim":2,"basis":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#);
    let w = write(&dir, "w.json", &diag_weight(&[1.0, 1.0]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("graph invariant violated"));
}

#[test]
fn full_graph_gives_operator_norm() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"dim":2,"classical_adjacency":[[0,1],[1,0]]}"#);
    let w = write(&dir, "w.json", &diag_weight(&[2.0, 1.0]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json_stdout(&out)["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn malformed_files_report_the_field() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", r#"{"dim":2,"basis":[],"edges":[]}"#);
    let w = write(&dir, "w.json", &diag_weight(&[1.0, 1.0]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("edges") && err.contains("line"), "{err}");

    let g = write(&dir, "g2.json", C5);
    let w = write(&dir, "w2.json", "{\"dim\": 5,\n \"matrix\": [1, 2]}");
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn unknown_form_and_suite_exit_one() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    for s in ["forms", "holder", "twirl", "classical"] {
        assert!(err.contains(s), "{err}");
    }
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", C5);
    let w = write(&dir, "w.json", &diag_weight(&[1.0; 5]));
    let out = run(&["compute", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--form", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["compute"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_tolerance_env_is_rejected() {
    let out = bin().args(["verify", "--suite", "twirl"]).env("NCTHETA_TOL", "abc").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn body_member_on_two_by_two_boundary() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", TWO_BY_TWO);
    let w = write(&dir, "w.json", &diag_weight(&[0.5, 0.5]));
    let out = run(&["body", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--mode", "member"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["member"], true);
    assert!(v["margin"].as_f64().unwrap().abs() <= 1e-6);

    let w = write(&dir, "w2.json", &diag_weight(&[0.6, 0.1]));
    let out = run(&["body", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--mode", "member"]);
    assert_eq!(json_stdout(&out)["member"], false);
}

#[test]
fn body_member_of_zero_weight() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", C5);
    let w = write(&dir, "w.json", &diag_weight(&[0.0; 5]));
    let out = run(&["body", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--mode", "member"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["member"], true);
    assert!((v["margin"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn body_psi_support_on_c5() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", C5);
    let w = write(&dir, "w.json", &diag_weight(&[1.0; 5]));
    for mode in ["psi-support", "support"] {
        let out = run(&["body", "--graph", g.to_str().unwrap(), "--weight", w.to_str().unwrap(), "--mode", mode]);
        assert_eq!(out.status.code(), Some(0));
        assert!((json_stdout(&out)["value"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-5, "{mode}");
    }
}

#[test]
fn verify_twirl_passes() {
    let out = run(&["verify", "--suite", "twirl", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["pass"], true);
    assert_eq!(last["seed"], 42);
}

#[test]
fn verify_thin_diag_with_blocks() {
    let out = run(&["verify", "--suite", "thin-diag", "--blocks", "1x2,2x1", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_output_is_deterministic() {
    let a = run(&["verify", "--suite", "holder", "--trials", "2"]);
    let b = run(&["verify", "--suite", "holder", "--trials", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn summary_table_is_human_readable() {
    let out = run(&["verify", "--suite", "gamma2", "--trials", "2", "--summary"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}
