use std::io::Write;
use std::process::{Command, Stdio};

fn run_in(dir: &std::path::Path, args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_glblocks"))
        .args(args)
        .current_dir(dir)
        .env("GLBLOCKS_CACHE_DIR", dir.join("cache"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run_in(dir.path(), args, "");
    (code, out)
}

const GL11: [&str; 6] = ["--m", "1", "--n", "1", "--block", "mu=0;nu=0;t=1"];

#[test]
fn gl11_cartan_csv() {
    let mut args = vec!["cartan"];
    args.extend(GL11);
    args.extend(["--window", "-2..2", "--format", "csv"]);
    let (code, out) = run(&args);
    assert_eq!(code, 0);
    let rows: Vec<Vec<i64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            let expect = match i.abs_diff(j) {
                0 => 2,
                1 => 1,
                _ => 0,
            };
            assert_eq!(*v, expect, "({i},{j})");
        }
    }
}

#[test]
fn h_of_one_is_three() {
    assert_eq!(run(&["h", "--lambda", "offset=0;parts=1"]), (0, "3\n".to_string()));
}

#[test]
fn dual_canonical_vector_json() {
    let (code, out) = run(&["cb", "--N", "2", "--signs", "+-", "--key", "2;2"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"{"terms":[{"key":[2,2],"coeff":{"0":"1"}},{"key":[1,1],"coeff":{"1":"-1"}}]}"#
    );
}

#[test]
fn cache_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["cb", "--N", "3", "--signs", "++-", "--key", "2,3;2"];
    let (_, cold, _) = run_in(dir.path(), &args, "");
    assert!(dir.path().join("cache").read_dir().unwrap().count() > 0);
    let (_, warm, _) = run_in(dir.path(), &args, "");
    let mut no_cache = args.to_vec();
    no_cache.push("--no-cache");
    let (_, off, _) = run_in(dir.path(), &no_cache, "");
    assert_eq!(cold, warm);
    assert_eq!(cold, off);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let mut args = vec!["graded-cartan"];
    args.extend(["--m", "2", "--n", "2", "--block", "mu=0;nu=0;t=2"]);
    args.extend(["--window", "0..2"]);
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
}

#[test]
fn cartan_json_feeds_recover() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "cartan", "--m", "2", "--n", "3", "--block", "mu=0:1;nu=1:2;t=1", "--window", "-3..4", "--col-window", "-4..5",
        "--format", "json",
    ];
    let (code, matrix, _) = run_in(dir.path(), &args, "");
    assert_eq!(code, 0);
    let (code, out, _) = run_in(dir.path(), &["recover"], &matrix);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), r#"{"t":1,"gamma":[1,2]}"#);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["h"]).0, 1);
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"rows":["a"],"cols":["a"],"entries":[["7"]]}"#;
    assert_eq!(run_in(dir.path(), &["recover"], bad).0, 2);
    assert_eq!(run(&["verify", "--profile", "quick", "--only", "12", "--inject", "12"]).0, 3);
    let (code, out) = run(&["verify", "--profile", "quick", "--only", "5,12"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 2);
}

#[test]
fn q_at_1_collapses_graded_output() {
    let mut args = vec!["graded-cartan"];
    args.extend(GL11);
    args.extend(["--lambda", "0:1", "--kappa", "1:1", "--q-at-1"]);
    assert_eq!(run(&args), (0, "\"1\"\n".to_string()));
}
