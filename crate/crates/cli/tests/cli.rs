use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn arbor(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_arbor")).args(args).output().expect("binary runs");
    let run = Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    };
    let parses = serde_json::from_str::<Value>(&run.stdout).is_ok();
    assert_eq!(parses, run.code == 0 || run.code == 1, "{args:?}: code {} stdout {:?}", run.code, run.stdout);
    run
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn disc_seq_contract() {
    let r = arbor(&["disc-seq", "--poly", "x^2-3", "--levels", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["classes"], serde_json::json!([3, 6]));

    let r = arbor(&["disc-seq", "--poly", "x^2", "--levels", "1"]);
    assert_eq!((r.code, json(&r)), (1, serde_json::json!({ "inseparable": 1 })));

    let r = arbor(&["disc-seq", "--poly", "x^^2", "--levels", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("position"));

    assert_eq!(arbor(&["disc-seq", "--poly", "x^2+1", "--levels", "0"]).code, 2);
    let r = arbor(&["disc-seq", "--poly", "x^2+1", "--levels", "3", "--base", "-1,2"]);
    assert_eq!(json(&r)["subspace"], serde_json::json!([-1, 2, 5]));
}

#[test]
fn index_report_contract() {
    let r = arbor(&["index-report", "--poly", "x^2-3", "--base", "3", "--level", "1", "--n", "1"]);
    assert_eq!(r.code, 1);
    assert_eq!(json(&r)["verdict"], "REFUTES_INDEX_AT_MOST(1)");

    let r = arbor(&["index-report", "--poly", "x^2+1", "--base", "", "--level", "1", "--n", "1", "--primes", "10"]);
    assert_eq!(r.code, 0);
    let v = json(&r);
    assert_eq!(v["verdict"], "CONSISTENT");
    assert_eq!(v["degree_lower_bound"], 2);
    assert_eq!(v["group_order"], 2);

    assert_eq!(arbor(&["index-report", "--poly", "x^2+1", "--level", "0"]).code, 2);
    let r = arbor(&["index-report", "--poly", "x^2+1", "--level", "1", "--primes", "0"]);
    assert_eq!((r.code, json(&r)["verdict"].as_str()), (0, Some("UNKNOWN")));
}

#[test]
fn simulate_verify_audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    let r = arbor(&["simulate", "--steps", "5", "--out", path_str(&trace)]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["dim"], 5);

    let r = arbor(&["verify", "--trace", path_str(&trace)]);
    assert_eq!((r.code, json(&r)), (0, serde_json::json!([])));

    let r = arbor(&["audit", "--trace", path_str(&trace), "--level", "2"]);
    assert_eq!(r.code, 0);
    let polys = json(&r)["polys"].as_array().unwrap().clone();
    assert!(polys.iter().any(|p| !p["at_level"]["killed"].as_array().unwrap().is_empty()));

    assert_eq!(arbor(&["audit", "--trace", path_str(&trace), "--level", "-1"]).code, 2);
    let r = arbor(&["audit", "--trace", path_str(&trace), "--level", "2", "--poly", "x^2"]);
    assert_eq!(r.code, 1);
}

#[test]
fn verify_flags_tampering_and_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    assert_eq!(arbor(&["simulate", "--steps", "3", "--out", path_str(&trace)]).code, 0);
    let text = fs::read_to_string(&trace).unwrap();

    let mut v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["steps"][1]["cover"]["h"], "x");
    v["steps"][1]["point"] = "4".into();
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, v.to_string()).unwrap();
    let r = arbor(&["verify", "--trace", path_str(&tampered)]);
    assert_eq!(r.code, 1);
    let codes: Vec<String> =
        json(&r).as_array().unwrap().iter().map(|x| x["code"].as_str().unwrap().to_string()).collect();
    assert!(codes.contains(&"(2_2)".to_string()), "{codes:?}");

    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(arbor(&["verify", "--trace", path_str(&truncated)]).code, 2);

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["schema"] = 99.into();
    let future = dir.path().join("future.json");
    fs::write(&future, v.to_string()).unwrap();
    assert_eq!(arbor(&["verify", "--trace", path_str(&future)]).code, 2);
    assert_eq!(arbor(&["audit", "--trace", path_str(&future), "--level", "2"]).code, 2);

    assert_eq!(arbor(&["verify", "--trace", path_str(&dir.path().join("missing.json"))]).code, 2);
}

#[test]
fn empty_trace_audits_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    assert_eq!(arbor(&["simulate", "--steps", "1", "--out", path_str(&trace)]).code, 0);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    v["steps"] = serde_json::json!([]);
    let empty = dir.path().join("empty.json");
    fs::write(&empty, v.to_string()).unwrap();
    let r = arbor(&["audit", "--trace", path_str(&empty), "--level", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["polys"], serde_json::json!([]));
}

#[test]
fn exhausted_bounds_leave_a_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    let r = arbor(&["simulate", "--steps", "200", "--height", "10", "--out", path_str(&trace)]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(v["status"], "aborted");
    assert!(v["steps"].as_array().unwrap().len() < 200);

    assert_eq!(arbor(&["simulate", "--steps", "5", "--depth", "0"]).code, 2);
    assert_eq!(arbor(&["simulate", "--steps", "0"]).code, 2);
}

#[test]
fn outputs_are_stable() {
    let a = arbor(&["simulate", "--steps", "4"]);
    let b = arbor(&["simulate", "--steps", "4"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains("version"));
    let m = arbor(&["group-order", "--d", "2", "--k", "3", "--meta"]);
    assert_eq!(json(&m)["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json(&m)["order"], 128);
    let r = arbor(&["verify", "--meta", "--trace", "/nonexistent"]);
    assert_eq!(r.code, 2);
}

#[test]
fn witnesses_and_group_orders() {
    let r = arbor(&["vast-witness", "--stream", "disc:x^2+1:n>=1", "--span", "-1,2"]);
    assert_eq!(r.code, 0);
    assert_eq!(json(&r)["witness"], 5);
    assert_eq!(json(&r)["position"], 3);
    assert_eq!(arbor(&["vast-witness", "--stream", "list:2,3", "--span", "6,2"]).code, 3);
    assert_eq!(arbor(&["vast-witness", "--stream", "bogus"]).code, 2);
    assert_eq!(arbor(&["vast-witness", "--stream", "disc:x^2:n>=1"]).code, 1);

    let r = arbor(&["group-order", "--d", "3", "--k", "2"]);
    assert_eq!(json(&r)["order"], 6u64.pow(4));
    let r = arbor(&["group-order", "--d", "2"]);
    assert_eq!(json(&r)["order"], "2^inf");
    assert_eq!(arbor(&["group-order", "--d", "1"]).code, 2);
}
