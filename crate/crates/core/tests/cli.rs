// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vertexion"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap().trim().to_owned()
}

const SMALL: [&str; 6] = ["--max-n", "2", "--max-N", "2", "--trials", "2"];

#[test]
fn lattice_and_formula_agree_through_the_binary() {
    let dir = TempDir::new().unwrap();
    let tri = write(
        dir.path(),
        "tri.json",
        r#"{"t": "2/7", "A": "3/5", "B": "-4/3", "u": ["5/2", "-1/3"], "w": ["2", "7/3", "-3"], "x": [1, 3]}"#,
    );
    let out = run(dir.path(), &["eval-w", "--config", &tri]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let line = stdout(&out);
    let (oracle, formula) = line.split_once(' ').unwrap();
    assert_eq!(oracle.strip_prefix("oracle=").unwrap(), formula.strip_prefix("formula=").unwrap());

    let ord = write(
        dir.path(),
        "ord.json",
        r#"{"t": "2/7", "sites": [{"a": "2", "b": "5/3", "c": "-1/4"}, {}, {"d": "3"}], "u": ["5/2", "-1/3"], "w": ["2", "7/3", "-3"], "x": [2, 3]}"#,
    );
    let ow = run(dir.path(), &["eval-ow", "--config", &ord]);
    let of = run(dir.path(), &["eval-of", "--config", &ord]);
    assert_eq!(ow.status.code(), Some(0));
    assert_eq!(stdout(&ow), stdout(&of));
}

#[test]
fn grothendieck_value_is_written_to_out() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "g.json", r#"{"beta": "1", "lambda": [2], "N": 3, "z": ["5/3"]}"#);
    let out = run(dir.path(), &["eval-groth", "--config", &cfg, "--out", "value.txt"]);
    assert_eq!(out.status.code(), Some(0));
    // G_(2)(z; β) = z^2 for a single variable.
    assert_eq!(stdout(&out), "25/9");
    assert_eq!(std::fs::read_to_string(dir.path().join("value.txt")).unwrap(), "25/9\n");
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let decimal = write(
        dir.path(),
        "bad.json",
        r#"{"t": "2/7", "A": "1", "B": "1", "u": ["1.5"], "w": ["2"], "x": []}"#,
    );
    let out = run(dir.path(), &["eval-w", "--config", &decimal]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("u[0]"));

    let missing = run(dir.path(), &["eval-f"]);
    assert_eq!(missing.status.code(), Some(2));

    let unknown = write(dir.path(), "v.json", r#"{"seeds": 3}"#);
    assert_eq!(run(dir.path(), &["verify", "--config", &unknown]).status.code(), Some(2));

    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_writes_reports_and_passes() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["verify", "--out", "r.json", "--seed", "3"];
    args.extend(SMALL);
    let out = run(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let reports = json.as_array().unwrap();
    assert!(reports.iter().all(|r| r["passed"] == true));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "check_id,N,n,m,x,trials,passed");
    assert_eq!(csv.lines().count(), reports.len() + 1);
}

#[test]
fn verify_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let report = |name: &str, seed: &str| {
        let mut args = vec!["verify", "--out", name, "--seed", seed];
        args.extend(SMALL);
        assert_eq!(run(dir.path(), &args).status.code(), Some(0));
        std::fs::read(dir.path().join(name)).unwrap()
    };
    let first = report("a.json", "9");
    assert_eq!(first, report("b.json", "9"));
    assert_ne!(first, report("c.json", "10"));
}

#[test]
fn injected_fault_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "fault.json", r#"{"fault": "unconstrained-sites"}"#);
    let mut args = vec!["verify", "--config", &cfg, "--out", "f.json"];
    args.extend(SMALL);
    let out = run(dir.path(), &args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ordinary.rll-gate"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    let failed: Vec<_> = json.as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r["witness"].is_object()));
}
