use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn netlogic(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netlogic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn capacity_writes_one_row_per_n() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(&["capacity", "--w", "1", "--n-max", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "capacity.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("w,n,subsets_tested,representable"));
    assert!(lines[1].starts_with("1,2,2,false"));
    assert!(lines[2].starts_with("1,3,3,false"));
    assert!(dir.path().join("capacity.json").exists());
    assert!(dir.path().join("run.json").exists());
}

#[test]
fn capacity_reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        assert_eq!(
            code(&netlogic(
                &["capacity", "--w", "2", "--n-max", "4", "--seed", "3"],
                d.path()
            )),
            0
        );
    }
    for f in ["capacity.csv", "capacity.json", "run.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn capacity_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&netlogic(
            &["capacity", "--w", "0", "--n-max", "3"],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&netlogic(
            &["capacity", "--w", "3", "--n-max", "3"],
            dir.path()
        )),
        1
    );
}

#[test]
fn compile_and_net_verifies_without_collision() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &["compile", fixture("and_net.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "verification.json")).unwrap();
    assert_eq!(v["verified"], true);
    assert!(v["collision"].is_null());
    // 3 nodes x 2 bits, then one line per reachable output
    let jsonl = read(dir.path(), "circuit.jsonl");
    assert!(jsonl.lines().count() >= 6);
    for line in jsonl.lines() {
        netlogic::logic::Predicate::from_json(line).unwrap();
    }
}

#[test]
fn compile_or_net_reports_collision() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &["compile", fixture("or_net.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "verification.json")).unwrap();
    assert_eq!(v["collision"], serde_json::json!([1, 2]));
}

#[test]
fn malformed_and_missing_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &["compile", fixture("malformed_net.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
    let o = netlogic(
        &["compile", dir.path().join("absent.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    let o = netlogic(&[], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn identity_pipeline_repeats_its_seed() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &[
            "pipeline",
            fixture("identity_pipeline.json").to_str().unwrap(),
            "--steps",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(dir.path(), "summary.csv"),
        "step,selected_token,residual\n1,1,0\n2,1,0\n3,1,0\n4,1,0\n"
    );
    assert_eq!(read(dir.path(), "trace.jsonl").lines().count(), 4);
    let ns: serde_json::Value = serde_json::from_str(&read(dir.path(), "null_space.json")).unwrap();
    assert_eq!(ns["nullity"], 0);
}

#[test]
fn aliased_pipeline_lists_the_pair() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &[
            "pipeline",
            fixture("aliased_pipeline.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let ns: serde_json::Value = serde_json::from_str(&read(dir.path(), "null_space.json")).unwrap();
    assert_eq!(ns["nullity"], 1);
    assert_eq!(ns["aliased_pairs"][0]["a"], 0);
    assert_eq!(ns["aliased_pairs"][0]["b"], 2);
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        netlogic(
            &[
                "pipeline",
                fixture("aliased_pipeline.json").to_str().unwrap(),
                "--steps",
                "7",
            ],
            d.path(),
        );
    }
    for f in ["trace.jsonl", "summary.csv", "null_space.json", "run.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn metaphor_scores_xor() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &[
            "metaphor",
            "--targets",
            fixture("metaphor_targets.jsonl").to_str().unwrap(),
            "--basis",
            fixture("metaphor_basis.jsonl").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "metaphor.csv");
    let xor_row = csv.lines().find(|l| l.starts_with("xor,")).unwrap();
    let fields: Vec<&str> = xor_row.split(',').collect();
    assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0);
    assert_eq!(fields[3].parse::<f64>().unwrap(), 0.5);
    let classes: Vec<Vec<String>> =
        serde_json::from_str(&read(dir.path(), "alias_classes.json")).unwrap();
    assert_eq!(
        classes,
        vec![
            vec!["xor".to_string(), "xor_again".into()],
            vec!["x1_again".into()]
        ]
    );
}

#[test]
fn metaphor_universe_mismatch_exits_one() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &[
            "metaphor",
            "--targets",
            fixture("metaphor_targets.jsonl").to_str().unwrap(),
            "--basis",
            fixture("metaphor_basis_n3.jsonl").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn experiment_config_drives_a_run() {
    let dir = TempDir::new().unwrap();
    let o = netlogic(
        &[
            "--config",
            fixture("experiment_capacity.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path(), "capacity.csv").lines().count(), 3);
    let run: serde_json::Value = serde_json::from_str(&read(dir.path(), "run.json")).unwrap();
    assert_eq!(run["seed"], 7);
}

#[test]
fn experiment_config_with_unknown_key_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"command": "capacity", "parameters": {"w": 1, "n_max": 2, "typo": 1}, "output_dir": "x", "seed": 0}"#).unwrap();
    let o = netlogic(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
}
