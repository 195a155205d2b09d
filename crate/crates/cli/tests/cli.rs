use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orepi")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Runs a command that must produce a report and validates the report's shape.
fn report(args: &[&str]) -> (i32, Value) {
    let (code, stdout, stderr) = run(args);
    assert_ne!(code, 2, "usage error for {args:?}: {stderr}");
    let v: Value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{stdout}"));
    validate(&v, code);
    (code, v)
}

fn validate(v: &Value, code: i32) {
    let obj = v.as_object().expect("report is an object");
    for key in ["command", "args", "checks", "summary", "elapsed_ms"] {
        assert!(obj.contains_key(key), "missing `{key}`");
    }
    assert!(v["command"].is_string());
    assert!(v["elapsed_ms"].is_u64());
    let checks = v["checks"].as_array().unwrap();
    let mut bad = 0;
    for c in checks {
        assert!(c["name"].is_string() && c["detail"].is_string());
        assert!(c.as_object().unwrap().contains_key("witness"));
        match c["status"].as_str().unwrap() {
            "pass" => {}
            "fail" | "error" => bad += 1,
            s => panic!("unknown status {s}"),
        }
    }
    let expected = if bad > 0 { 1 } else { 0 };
    assert_eq!(code, expected, "exit code disagrees with the checks");
    assert_eq!(v["summary"]["exit_code"].as_i64(), Some(expected as i64));
}

fn without_timing(s: &str) -> String {
    let mut v: Value = serde_json::from_str(s).unwrap();
    v.as_object_mut().unwrap().remove("elapsed_ms");
    serde_json::to_string(&v).unwrap()
}

fn statuses(v: &Value) -> Vec<&str> {
    v["checks"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect()
}

#[test]
fn identity_check_example_gives_eight_passes() {
    let (code, v) = report(&["identity-check", "--family", "Hpq", "--lemma", "H.yxn", "--n-max", "8", "--params", "p=p,q=q"]);
    assert_eq!(code, 0);
    assert_eq!(statuses(&v), vec!["pass"; 8]);
}

#[test]
fn pi_decide_gap_example_is_unknown() {
    let (code, v) = report(&["pi-decide", "--family", "Bqf", "--f", "t^8", "--q", "z3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "Unknown");
}

fn build_file(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_s = path.to_str().unwrap().to_string();
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_s]);
    let (code, _) = report(&full);
    assert_eq!(code, 0);
    path_s
}

#[test]
fn confluence_flags_a_violating_biquad_file() {
    let dir = tempfile::tempdir().unwrap();
    // q1 q2 != 1 with lambda != 0 breaks (1 - q1 q2) lambda = 0.
    let bad = build_file(dir.path(), "bad.json", &["--family", "BiQuad3", "--params", "q1=2,q2=1,q3=1,lambda=1"]);
    let (code, v) = report(&["confluence", "--file", &bad]);
    assert_eq!(code, 1);
    let fail = v["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert_eq!(fail["name"], "overlap x3*x2*x1");
    assert_ne!(fail["witness"]["residual"], "0");
    assert_eq!(v["result"]["confluent"], false);

    let good = build_file(dir.path(), "good.json", &["--family", "BiQuad3", "--params", "q1=2,q2=1/2,q3=1,lambda=1"]);
    let (code, v) = report(&["confluence", "--file", &good]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn presentation_files_round_trip_for_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["--family", "Bh", "--params", "h=z5"],
        &["--family", "Hpq", "--params", "p=p,q=q"],
        &["--family", "M2", "--params", "alpha=2,beta=3/4"],
        &["--family", "UqB2", "--q", "q"],
        &["--family", "WeylMalt", "--params", "q1=-1,q2=2,l12=3"],
        &["--family", "WeylAJ", "--params", "q1=z3,q2=z3,l12=z3"],
        &["--family", "BiQuad3", "--params", "q1=2,q2=1/2,q3=1,lambda=1"],
        &["--family", "ThreeCyclic", "--params", "q=z6,alpha=1,beta=2,gamma=3"],
        &["--family", "DownUp", "--params", "alpha=2,beta=-1,gamma=1"],
        &["--family", "Bqf", "--f", "1 + 2*t^3", "--q", "z3"],
        &["--family", "QuantumPlane", "--field", "gf:5", "--q", "2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = build_file(dir.path(), &format!("p{i}.json"), args);
        let (_, first) = report(&["build", "--file", &path]);
        let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(first["result"], written, "{args:?}");
        assert!(written["family"].is_object());
    }
}

#[test]
fn plain_presentation_file_without_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plane.json");
    let doc = r#"{
        "field": {"spec": "ratfunc:q"},
        "generators": ["x", "y"],
        "weights": [1, 1],
        "precedence": ["x", "y"],
        "rules": [{"lhs": ["y", "x"], "rhs": [{"coeff": "q", "word": ["x", "y"]}]}]
    }"#;
    std::fs::write(&path, doc).unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = report(&["normalize", "--file", p, "--expr", "y^2*x"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks"][0]["detail"], "q^2*x*y^2");
    let (code, v) = report(&["central-check", "--file", p, "--element", "x*y"]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["witness"]["residual"].is_string());
    let (code, _, _) = run(&["pi-decide", "--file", p]);
    assert_eq!(code, 2);
}

#[test]
fn reports_are_deterministic() {
    let commands: &[&[&str]] = &[
        &["families"],
        &["pi-decide", "--family", "Hpq", "--params", "p=z2,q=z3"],
        &["pi-decide", "--family", "DownUp", "--params", "alpha=2,beta=-1,gamma=0"],
        &["central-check", "--family", "M2", "--params", "alpha=z3,beta=z3"],
        &["confluence", "--family", "UqB2", "--q", "q"],
        &["identity-search", "--n", "2", "--degree", "4"],
    ];
    for args in commands {
        let (_, a, _) = run(args);
        let (_, b, _) = run(args);
        assert_eq!(without_timing(&a), without_timing(&b), "{args:?}");
    }
}

#[test]
fn decider_verdicts_verify() {
    let table: &[(&[&str], &str)] = &[
        (&["--family", "Bh", "--params", "h=z5"], "PI"),
        (&["--family", "Bh", "--params", "h=2"], "NotPI"),
        (&["--family", "M2", "--params", "alpha=z3,beta=z4"], "PI"),
        (&["--family", "UqB2", "--q", "q"], "NotPI"),
        (&["--family", "ThreeCyclic", "--params", "q=2,alpha=1,beta=2,gamma=3"], "NotPI"),
        (&["--family", "DownUp", "--params", "alpha=0,beta=1,gamma=0"], "PI"),
        (&["--family", "Bqf", "--f", "t", "--q", "z3"], "PI"),
    ];
    for (inst, want) in table {
        let mut args = vec!["pi-decide"];
        args.extend_from_slice(inst);
        let (code, v) = report(&args);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["result"]["verdict"], *want, "{inst:?}");
        assert!(v["checks"].as_array().unwrap().len() > 1, "witness was not verified for {inst:?}");
    }
}

#[test]
fn spanning_uses_decider_caps() {
    let (code, v) = report(&["spanning", "--family", "Hpq", "--params", "p=z2,q=z3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["caps"], serde_json::json!([2, 6, 6]));
    let (code, v) = report(&["spanning", "--family", "Hpq", "--params", "p=z2,q=z3", "--caps", "1,1,1", "--degree", "3"]);
    assert_eq!(code, 1);
    assert!(v["checks"][0]["witness"]["first_missing"].is_string());
}

#[test]
fn matrix_commands() {
    let (code, v) = report(&["matrep", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["generators"]["x"].as_array().unwrap().len(), 4);
    let (code, _) = report(&["matrep", "--n", "4", "--q", "z2", "--field", "cyclo:4"]);
    assert_eq!(code, 1);
    let (code, v) = report(&["identity-search", "--n", "2", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["dimension"], 0);
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["bogus"],
        &["pi-decide"],
        &["pi-decide", "--family", "Nope"],
        &["pi-decide", "--family", "Hpq", "--params", "p=1/0,q=2"],
        &["pi-decide", "--family", "Hpq", "--params", "p=2"],
        &["pi-decide", "--family", "Hpq", "--params", "p=z3,q=q"],
        &["identity-check", "--family", "Hpq", "--params", "p=p,q=q", "--lemma", "H.nope"],
        &["confluence", "--file", "/nonexistent/presentation.json"],
    ];
    for args in cases {
        let (code, stdout, _) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(stdout.is_empty());
    }
}

#[test]
fn runtime_failures_are_error_records() {
    // Hpq needs pq != 1.
    let (code, v) = report(&["pi-decide", "--family", "Hpq", "--params", "p=2,q=1/2"]);
    assert_eq!(code, 1);
    assert_eq!(statuses(&v), vec!["error"]);
}
