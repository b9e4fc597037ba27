//! Command-line acceptance: byte-identical verify reports across runs
//! (criterion 10) and the documented exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rkbslab")
}

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("create test dir");
    dir
}

fn run(args: &[&str], cwd: &Path) -> (i32, String) {
    let output = Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn rkbslab");
    let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
    (output.status.code().expect("exit code"), stderr)
}

#[test]
fn criterion_10_verify_pipeline_is_byte_identical() {
    let dir = workdir("determinism");
    let config = dir.join("config.json");
    fs::write(
        &config,
        r#"{
  "seed": 90210,
  "activation": {"kind": "tanh"},
  "samples": {"n": 4, "dim": 2},
  "grid": {"scheme": "uniform_cube", "m": 16},
  "partition": {"rule": "round_robin", "blocks": 2},
  "suite_instances": {"decomposition": 25, "compatibility": 15, "inclusion": 10, "kernel": 15, "reformulation": 10}
}"#,
    )
    .expect("write config");

    let (code1, log1) = run(
        &["verify", "--config", "config.json", "--out", "run1"],
        &dir,
    );
    assert_eq!(code1, 0, "first verify failed:\n{log1}");
    let (code2, log2) = run(
        &["verify", "--config", "config.json", "--out", "run2"],
        &dir,
    );
    assert_eq!(code2, 0, "second verify failed:\n{log2}");

    let mut names: Vec<String> = fs::read_dir(dir.join("run1"))
        .expect("read run1")
        .map(|e| e.expect("entry").file_name().into_string().expect("utf8"))
        .collect();
    names.sort();
    assert_eq!(
        names.len(),
        7,
        "expected seven suite reports, got {names:?}"
    );
    for name in &names {
        let a = fs::read(dir.join("run1").join(name)).expect("read run1 report");
        let b = fs::read(dir.join("run2").join(name)).expect("read run2 report");
        assert_eq!(a, b, "report {name} differs between identical runs");
        let text = String::from_utf8(a).expect("utf8 report");
        assert!(text.contains("\"config_digest\":"));
        assert!(text.contains("\"seed\":90210"));
        assert!(text.contains("\"pass\":true"), "{name} did not pass");
    }
    println!(
        "ACCEPTANCE 10 (determinism): PASS  [{} byte-identical reports]",
        names.len()
    );
}

#[test]
fn failing_suite_exits_1() {
    let dir = workdir("suitefail");
    // Tolerances far below floating-point resolution force a failure.
    fs::write(
        dir.join("config.json"),
        r#"{
  "seed": 11,
  "activation": {"kind": "relu"},
  "samples": {"n": 3, "dim": 1},
  "grid": {"scheme": "uniform_cube", "m": 8},
  "suites": ["compatibility"],
  "suite_instances": {"compatibility": 5},
  "tolerances": {"solver_identity": 1e-18, "closed_form": 1e-18}
}"#,
    )
    .expect("write config");
    let (code, log) = run(&["verify", "--config", "config.json", "--out", "out"], &dir);
    assert_eq!(code, 1, "stderr:\n{log}");
    assert!(log.contains("FAIL"));
    let report = fs::read_to_string(dir.join("out").join("compatibility.json")).expect("report");
    assert!(report.contains("\"pass\":false"));
}

#[test]
fn malformed_config_exits_2() {
    let dir = workdir("badconfig");
    let config = dir.join("config.json");
    fs::write(&config, "{ not json").expect("write config");
    let (code, log) = run(&["verify", "--config", "config.json"], &dir);
    assert_eq!(code, 2, "stderr:\n{log}");

    // Unknown subcommand and missing --config are usage errors.
    let (code, _) = run(&["frobnicate", "--config", "config.json"], &dir);
    assert_eq!(code, 2);
    let (code, _) = run(&["verify"], &dir);
    assert_eq!(code, 2);
}

#[test]
fn unrepresentable_norm_target_exits_3() {
    let dir = workdir("infeasible");
    fs::write(dir.join("table.csv"), "2,1\n1.0\n1.0\n").expect("write table");
    fs::write(dir.join("labels.json"), "[1.0, -1.0]").expect("write labels");
    fs::write(
        dir.join("config.json"),
        r#"{
  "seed": 7,
  "activation": {"kind": "tabulated", "path": "table.csv"},
  "samples": {"n": 2, "dim": 1},
  "grid": {"scheme": "explicit", "atoms": [{"theta": [0.0], "bias": 0.0}]},
  "labels": {"source": "file", "path": "labels.json"}
}"#,
    )
    .expect("write config");
    let (code, log) = run(&["norm", "--config", "config.json", "--out", "out"], &dir);
    assert_eq!(code, 3, "stderr:\n{log}");
    assert!(log.contains("infeasible"));
}

#[test]
fn train_above_lambda_max_writes_empty_atoms() {
    let dir = workdir("threshold");
    fs::write(dir.join("table.csv"), "2,1\n1.0\n1.0\n").expect("write table");
    fs::write(dir.join("labels.json"), "[1.0, 1.0]").expect("write labels");
    // lambda_max = |(2/2)(1 + 1)| = 2 for this instance.
    fs::write(
        dir.join("config.json"),
        r#"{
  "seed": 7,
  "activation": {"kind": "tabulated", "path": "table.csv"},
  "samples": {"n": 2, "dim": 1},
  "grid": {"scheme": "explicit", "atoms": [{"theta": [0.0], "bias": 0.0}]},
  "labels": {"source": "file", "path": "labels.json"},
  "lambdas": [3.0]
}"#,
    )
    .expect("write config");
    let (code, log) = run(&["train", "--config", "config.json", "--out", "out"], &dir);
    assert_eq!(code, 0, "stderr:\n{log}");
    let artifact = fs::read_to_string(dir.join("out").join("train_000.json")).expect("artifact");
    assert!(artifact.contains("\"atoms\":[]"), "artifact: {artifact}");
}

#[test]
fn assemble_writes_the_table_verbatim() {
    let dir = workdir("assemble");
    fs::write(dir.join("table.csv"), "2,2\n1.0,0.5\n-0.25,2.0\n").expect("write table");
    fs::write(
        dir.join("config.json"),
        r#"{
  "seed": 7,
  "activation": {"kind": "tabulated", "path": "table.csv"},
  "samples": {"n": 2, "dim": 1},
  "grid": {"scheme": "explicit", "atoms": [{"theta": [0.0], "bias": 0.0}, {"theta": [1.0], "bias": 0.0}]}
}"#,
    )
    .expect("write config");
    let (code, log) = run(
        &["assemble", "--config", "config.json", "--out", "out"],
        &dir,
    );
    assert_eq!(code, 0, "stderr:\n{log}");
    let csv = fs::read_to_string(dir.join("out").join("matrix.csv")).expect("matrix");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("2,2"));
    let row: Vec<f64> = lines
        .next()
        .expect("row")
        .split(',')
        .map(|v| v.parse().expect("decimal"))
        .collect();
    assert_eq!(row, vec![1.0, 0.5]);

    let (code, _) = run(
        &["spectrum", "--config", "config.json", "--out", "out"],
        &dir,
    );
    assert_eq!(code, 0);
    let spec = fs::read_to_string(dir.join("out").join("spectrum.csv")).expect("spectrum");
    assert!(spec.starts_with("1,2\n"));
}
