//! End-to-end tests of the binary: output shapes, exit codes, determinism.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treecohom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn betti_path3_text() {
    let out = run(&["betti", "--builtin", "path:3", "--method", "both"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "1 3 5 6 5 3 1\n");
}

#[test]
fn betti_branched_json() {
    let out = run(&["betti", "--builtin", "a:1,2", "--json"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(value["betti"], serde_json::json!([1, 3, 6, 6, 3, 1]));
    assert_eq!(value["dim"], serde_json::json!(5));
}

#[test]
fn betti_missing_file_exits_2() {
    let out = run(&["betti", "missing.tree"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no such file"), "stderr: {}", stderr(&out));
}

#[test]
fn betti_from_file() {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    write!(file, "nodes 2\nedge 1 2 1\n").expect("write");
    let path = file.path().to_str().expect("utf8 path");
    let out = run(&["betti", path]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "1 2 2 1\n");
}

#[test]
fn betti_per_weight_lists_blocks() {
    let out = run(&["betti", "--builtin", "path:1", "--per-weight"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("1 1"));
    assert_eq!(lines.next(), Some("p=0 w=[0,0] dim=1"));
    assert_eq!(lines.next(), Some("p=1 w=[-1,1] dim=1"));
    assert_eq!(lines.next(), None);
}

#[test]
fn betti_rejects_large_model_without_force() {
    let out = run(&["betti", "--builtin", "a:4,4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--force"), "stderr: {}", stderr(&out));
}

#[test]
fn betti_determinism_byte_identical() {
    let first = run(&["betti", "--builtin", "a:2,2", "--json"]);
    let second = run(&["betti", "--builtin", "a:2,2", "--json"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn betti_thread_cap_env_still_succeeds() {
    let out = Command::new(env!("CARGO_BIN_EXE_treecohom"))
        .args(["betti", "--builtin", "path:2"])
        .env("TREECOHOM_THREADS", "1")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 2 2 1\n");
}

#[test]
fn verify_three_checks_pass() {
    let out = run(&["verify", "--builtin", "path:2", "--checks", "euler,totalrank,b2"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches(": pass").count(), 3, "stdout: {text}");
}

#[test]
fn verify_solvable_multi3() {
    let out = run(&["verify", "--builtin", "multi:3", "--checks", "solvable"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("solvable: pass"), "stdout: {text}");
    assert!(text.contains(r#""betti":[1,2,1,0,0,0,0,0]"#), "stdout: {text}");
}

#[test]
fn verify_closedform_branched() {
    let out = run(&["verify", "--builtin", "a:1,1", "--checks", "closedform", "--json"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(value[0]["check"], "closedform");
    assert_eq!(value[0]["pass"], true);
    assert_eq!(value[0]["details"]["counts"], serde_json::json!([1, 2, 2, 1]));
}

#[test]
fn verify_b2_failure_exits_1() {
    let out = run(&["verify", "--builtin", "instar:2", "--checks", "b2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("b2: FAIL"), "stdout: {}", stdout(&out));
}

#[test]
fn verify_unknown_check_exits_2() {
    let out = run(&["verify", "--builtin", "path:2", "--checks", "euler,bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown check"), "stderr: {}", stderr(&out));
}

#[test]
fn verify_vandermonde_needs_path() {
    let out = run(&["verify", "--builtin", "multi:2", "--checks", "vandermonde"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", "--builtin", "path:2", "--checks", "vandermonde"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}

#[test]
fn tableaux_counts_agree() {
    let out = run(&["tableaux", "--m", "2", "--n", "1", "--degree", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "count=4 (enum) count=4 (hook)\n");

    let out = run(&["tableaux", "--m", "1", "--n", "1", "--degree", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "count=1 (enum) count=1 (hook)\n");

    let out = run(&["tableaux", "--m", "1", "--n", "1", "--degree", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "count=1 (enum) count=1 (hook)\n");
}

#[test]
fn tableaux_list_prints_fillings() {
    let out = run(&["tableaux", "--m", "2", "--n", "1", "--degree", "2", "--list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains(r#"{"rows":[[1,2]],"shape":[2]}"#), "stdout: {text}");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn dump_and_source_validation() {
    let out = run(&["dump", "--builtin", "path:2", "--json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(value["basis"].as_array().expect("basis array").len(), 3);

    let out = run(&["dump"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("diagram source"), "stderr: {}", stderr(&out));
}
