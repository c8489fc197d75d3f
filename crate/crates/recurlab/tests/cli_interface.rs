//! Wire-format tests for the `recurlab` binary: JSON shapes, CSV headers,
//! exit codes, worker-count determinism, and file output.

use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_recurlab")
}

fn run_with_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    stdout_str(out)
        .lines()
        .map(|line| serde_json::from_str(line).unwrap_or_else(|e| panic!("bad JSON {line:?}: {e}")))
        .collect()
}

#[test]
fn classify_reports_limit_verdict() {
    let out = run(&["classify", "--family", "moebius:a=2,b=-1,c=1,d=0"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["status"], "NotRecurrentProved");
    assert_eq!(lines[0]["reason"], "limit-accumulation");
    assert!(lines[0]["certificate"]["LimitWindow"].is_object());
}

#[test]
fn classify_reports_linear_closure() {
    let out = run(&["classify", "--family", "linear:a=1,b=5"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines[0]["status"], "RecurrentProved");
    assert_eq!(lines[0]["reason"], "closure-criterion");
}

#[test]
fn bad_descriptor_is_a_usage_error() {
    let out = run(&["classify", "--family", "moebius:a=,b=0,c=1,d=0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("descriptor error at byte"),
        "stderr should carry a positional diagnostic, got: {stderr}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn witness_reports_pair_shape() {
    let out = run(&[
        "witness",
        "--coloring",
        "rado3",
        "--family",
        "linear:a=1,b=1",
        "--max-n",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 1);
    let rec = &lines[0];
    assert_eq!(rec["found"], true);
    let pair = rec["pair"].as_array().expect("pair is an array");
    assert_eq!(pair.len(), 2);
    assert!(pair[0].as_u64().unwrap() < pair[1].as_u64().unwrap());
    assert!(rec["ratio"].as_str().expect("ratio is a string").contains('/'));
    assert!(rec["exhaustive"].is_boolean());
}

#[test]
fn density_csv_header_is_stable() {
    let out = run(&[
        "density",
        "--op",
        "prefix",
        "--family",
        "linear:a=2,b=1",
        "--max-n",
        "1000",
        "--output",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,count,total,value"));
    let mut rows = 0;
    for row in lines {
        assert_eq!(row.split(',').count(), 4, "malformed CSV row {row:?}");
        rows += 1;
    }
    assert!(rows >= 1);
}

#[test]
fn gap_csv_header_is_stable() {
    let out = run(&[
        "gap",
        "--kind",
        "omega-root",
        "--q",
        "3",
        "--a",
        "2",
        "--k",
        "1",
        "--max-n",
        "200",
        "--output",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert_eq!(text.lines().next(), Some("n,lhs,rhs,gap"));
}

#[test]
fn csv_is_rejected_where_no_tabular_form_exists() {
    let out = run(&["classify", "--family", "linear:a=1,b=1", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn worker_count_never_changes_bytes() {
    let args = ["ff", "--p", "101", "--op", "pair:density=0.2,trials=4", "--seed", "11"];
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend_from_slice(&["--workers", workers]);
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(stdout_str(&out));
    }
    assert_eq!(outputs[0], outputs[1], "output bytes depend on --workers");
    // And the same invocation twice is reproducible.
    let again = run(&[&args[..], &["--workers", "4"][..]].concat());
    assert_eq!(stdout_str(&again), outputs[1]);
}

#[test]
fn out_flag_writes_the_same_bytes_to_a_file() {
    let args = ["witness", "--coloring", "constant", "--family", "geom:p=2,q=1"];
    let direct = run(&args);
    assert_eq!(direct.status.code(), Some(0));
    let path = std::env::temp_dir().join(format!("recurlab-out-{}.jsonl", std::process::id()));
    let path_str = path.to_str().expect("temp path is UTF-8");
    let filed = run(&[&args[..], &["--out", path_str][..]].concat());
    assert_eq!(filed.status.code(), Some(0));
    assert!(filed.stdout.is_empty(), "--out must silence stdout");
    let written = std::fs::read_to_string(&path).expect("output file exists");
    std::fs::remove_file(&path).ok();
    assert_eq!(written, stdout_str(&direct));
}

#[test]
fn env_var_sets_default_workers() {
    let out = run_with_env(
        &["classify", "--family", "moebius:a=1,b=2,c=1,d=0"],
        &[("RECURLAB_WORKERS", "2")],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["status"], "RecurrentProved");
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["classify"]).status.code(), Some(2)); // missing --family
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_obstruction_shapes() {
    let holds = run(&["verify-obstruction", "--a", "2", "--b", "1"]);
    assert_eq!(holds.status.code(), Some(0));
    let rec = &json_lines(&holds)[0];
    assert_eq!(rec["criterion_holds"], true);
    assert!(rec["report"].is_null());

    let system = run(&["verify-obstruction", "--a", "4", "--b", "2"]);
    assert_eq!(system.status.code(), Some(0));
    let rec = &json_lines(&system)[0];
    assert_eq!(rec["criterion_holds"], false);
    assert_eq!(rec["homomorphism_ok"], true);
    assert_eq!(rec["all_fixed_point_free"], true);
    assert_eq!(rec["fixed_point_free_checked"], 100);
}

#[test]
fn semigroup_closure_reports_violation() {
    let out = run(&[
        "semigroup",
        "--family",
        "linear:a=4,b=2",
        "--op",
        "closure",
        "--max-n",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &json_lines(&out)[0];
    let v = &rec["violation"];
    assert!(v.is_object(), "4ℕ+2 is not closed, expected a violation");
    let (x, y) = (v["x"].as_u64().unwrap(), v["y"].as_u64().unwrap());
    assert_eq!(v["product"].as_u64().unwrap(), x * y);
    assert_eq!((x * y) % 4, 0, "product must leave the residue class");
}

#[test]
fn omega_witness_rows_are_congruent() {
    let out = run(&["omega-witness", "--a", "1", "--k", "1", "--q", "2", "--max-n", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    assert!(!lines.is_empty());
    for rec in &lines {
        assert_eq!(rec["gap"].as_f64(), Some(0.0), "witness row with nonzero residue gap");
    }
}
