use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

use bioselect::classifiers::ClassifierSpec;
use bioselect::dataset::synthetic;
use bioselect::harness::{check_leakage, run_experiment, ExperimentConfig, ExperimentReport, NO_FS};
use bioselect::{Algorithm, Dataset};

fn small_config(dir: &Path) -> ExperimentConfig {
    let data: Dataset = synthetic(160, 6, 3, 5);
    let path = dir.join("toy.csv");
    data.save_csv(&path).unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.dataset.path = path;
    cfg.dataset.load.label_column = "label".into();
    cfg.run.agents = 6;
    cfg.run.generations = 4;
    cfg.classifiers = vec![ClassifierSpec::knn(), ClassifierSpec::decision_tree()];
    cfg.repetitions = 2;
    cfg.master_seed = 3;
    cfg
}

#[test]
fn records_one_cycle_per_repetition_classifier_and_feature_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let report = run_experiment(&cfg).unwrap();
    // 2 repetitions x 2 classifiers x (no FS + 3 algorithms)
    assert_eq!(report.raw.len(), 2 * 2 * 4);
    assert_eq!(report.rows.len(), 2 * 4);
    assert_eq!(report.selections.len(), 3);
    let sets: BTreeSet<&str> = report.raw.iter().map(|r| r.feature_set.as_str()).collect();
    assert!(sets.contains(NO_FS));
}

#[test]
fn empty_algorithm_list_reports_only_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.algorithms.clear();
    let report = run_experiment(&cfg).unwrap();
    assert!(report.selections.is_empty());
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows.iter().all(|r| r.feature_set == NO_FS && r.n_features == 6));
}

#[test]
fn report_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.algorithms = vec![Algorithm::Ga];
    let report = run_experiment(&cfg).unwrap();
    let text = report.to_json().unwrap();
    let back = ExperimentReport::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
}

#[test]
fn leakage_guard_flags_shared_rows() {
    let d: Dataset = synthetic(20, 3, 1, 1);
    let train = d.select_rows(&(0..12).collect::<Vec<_>>());
    let test = d.select_rows(&(12..20).collect::<Vec<_>>());
    check_leakage(&train, &test).unwrap();
    let overlapping = d.select_rows(&(10..20).collect::<Vec<_>>());
    assert!(check_leakage(&train, &overlapping).is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bioselect"))
}

#[test]
fn cli_reports_missing_config_with_stage_and_failure_code() {
    let out = bin()
        .args(["select", "--config", "/nonexistent/exp.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("config"), "{err}");
}

#[test]
fn cli_rejects_unknown_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(&cfg_path, cfg.to_toml().unwrap()).unwrap();
    let out = bin()
        .args(["select", "--algorithm", "ant"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("ant"));
}

#[test]
fn cli_select_writes_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(&cfg_path, cfg.to_toml().unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["select", "--algorithm", "woa"])
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("select_woa.json").exists());
    let history = std::fs::read_to_string(out_dir.join("history_woa.csv")).unwrap();
    assert_eq!(history.lines().count(), 1 + 4);
}
