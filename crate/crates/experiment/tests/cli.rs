use std::process::Command;

fn dmsrl() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dmsrl"));
    c.env("DMSRL_LOG", "warn");
    c
}

#[test]
fn run_subcommand_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "[learner]\nalgorithm = \"layered\"\n[run]\nhorizon = 50\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = dmsrl()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--seeds",
            "3,4",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(out.join("slots_seed3.csv").exists());
    assert!(out.join("slots_seed4.csv").exists());
}

#[test]
fn bad_config_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[learner]\nalgorithm = \"layered\"\ngamma = 1.5\n").unwrap();
    let status = dmsrl()
        .args(["run", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));

    let missing = dir.path().join("missing.toml");
    let status = dmsrl()
        .args(["run", missing.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn oracle_subcommand_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("o.toml");
    std::fs::write(
        &cfg,
        "[learner]\nalgorithm = \"oracle-greedy\"\n[oracle]\nreference_samples = 20000\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let status = dmsrl()
        .args([
            "oracle",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(out.join("oracle.csv").exists());
}
