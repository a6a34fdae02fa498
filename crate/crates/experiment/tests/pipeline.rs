use std::fs;

use dmsrl_core::metrics::SlotEntry;
use dmsrl_experiment::artifacts::{self, ErrorRow, OracleRow, SummaryRow};
use dmsrl_experiment::config::Horizon;
use dmsrl_experiment::{
    compare_to_dir, run_to_dir, Algorithm, ExperimentConfig, ExperimentError, LearnerConfig,
};

fn config(alg: Algorithm, slots: u64, seeds: &[u64]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(LearnerConfig::new(alg));
    cfg.run.horizon = Horizon::Slots(slots);
    cfg.run.seeds = seeds.to_vec();
    cfg.oracle.reference_samples = 20_000;
    cfg
}

#[test]
fn ten_slot_run_writes_one_summary_row_and_ten_slot_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_to_dir(&config(Algorithm::Centralized, 10, &[1]), dir.path()).unwrap();
    assert_eq!(out.runs.len(), 1);
    let summary: Vec<SummaryRow> =
        artifacts::read_rows(&dir.path().join(artifacts::SUMMARY_CSV)).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].slots, 10);
    let slots: Vec<SlotEntry> =
        artifacts::read_rows(&dir.path().join(artifacts::slots_csv_name(1))).unwrap();
    assert_eq!(slots.len(), 10);
    assert_eq!(&slots[..], out.runs[0].stats.entries());
    assert!(dir.path().join(artifacts::REWARD_SVG).exists());
    assert!(dir.path().join(artifacts::CONFIG_ECHO).exists());
}

#[test]
fn same_seed_gives_byte_identical_summaries() {
    let cfg = config(Algorithm::VirtualEt, 2_000, &[4, 5]);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_to_dir(&cfg, a.path()).unwrap();
    run_to_dir(&cfg, b.path()).unwrap();
    for name in [artifacts::SUMMARY_CSV, "slots_seed4.csv", "slots_seed5.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn the_config_echo_reproduces_the_run() {
    let mut cfg = config(Algorithm::Layered, 1_500, &[7]);
    cfg.oracle.enabled = true;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_to_dir(&cfg, a.path()).unwrap();
    let echo = ExperimentConfig::load(&a.path().join(artifacts::CONFIG_ECHO)).unwrap();
    run_to_dir(&echo, b.path()).unwrap();
    for name in [
        artifacts::CONFIG_ECHO,
        artifacts::SUMMARY_CSV,
        artifacts::ERRORS_CSV,
        artifacts::ORACLE_CSV,
        "slots_seed7.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn oracle_and_error_tables_round_trip() {
    let mut cfg = config(Algorithm::Centralized, 1_200, &[2]);
    cfg.oracle.enabled = true;
    cfg.run.checkpoint_interval = 500;
    let dir = tempfile::tempdir().unwrap();
    let out = run_to_dir(&cfg, dir.path()).unwrap();
    let errors: Vec<ErrorRow> =
        artifacts::read_rows(&dir.path().join(artifacts::ERRORS_CSV)).unwrap();
    let slots: Vec<u64> = errors.iter().map(|e| e.slots).collect();
    assert_eq!(slots, vec![500, 1_000, 1_200]);
    assert_eq!(
        errors.last().unwrap().weighted_error,
        out.runs[0].final_error().unwrap()
    );

    let oracle: Vec<OracleRow> =
        artifacts::read_rows(&dir.path().join(artifacts::ORACLE_CSV)).unwrap();
    let solved = out.oracle.as_ref().unwrap();
    assert_eq!(oracle.len(), solved.values().len());
    let mass: f64 = oracle.iter().map(|r| r.stationary).sum();
    assert!((mass - 1.0).abs() < 1e-9);
    for (row, v) in oracle.iter().zip(solved.values()) {
        assert_eq!(row.value, *v);
    }
}

#[test]
fn comparison_writes_one_row_per_config() {
    let cfgs = vec![
        config(Algorithm::Centralized, 500, &[1, 2]),
        config(Algorithm::Grace, 500, &[1, 2]),
    ];
    let dir = tempfile::tempdir().unwrap();
    compare_to_dir(&cfgs, dir.path()).unwrap();
    let rows: Vec<artifacts::ComparisonRow> =
        artifacts::read_rows(&dir.path().join(artifacts::COMPARISON_CSV)).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].seeds, 2);
    assert_eq!(rows[1].algorithm, "grace");
}

#[test]
fn comparison_rejects_mismatched_systems() {
    let a = config(Algorithm::Centralized, 100, &[1]);
    let mut b = config(Algorithm::Layered, 100, &[1]);
    b.dms.buffer_capacity = 20;
    let dir = tempfile::tempdir().unwrap();
    let err = compare_to_dir(&[a, b], dir.path()).unwrap_err();
    assert!(matches!(err, ExperimentError::Compare(_)));
    assert!(err.is_config());
}

#[test]
fn invalid_settings_are_config_errors() {
    let mut cfg = config(Algorithm::Centralized, 100, &[]);
    assert!(cfg.validate().unwrap_err().is_config());
    cfg.run.seeds = vec![1];
    cfg.run.horizon = Horizon::Slots(0);
    assert!(cfg.validate().unwrap_err().is_config());
    assert!(
        ExperimentConfig::from_toml("[learner]\nalgorithm = \"sarsa\"\n")
            .unwrap_err()
            .is_config()
    );
    assert!(
        ExperimentConfig::from_toml("[learner]\nalgorithm = \"layered\"\nbogus = 1\n")
            .unwrap_err()
            .is_config()
    );
}
