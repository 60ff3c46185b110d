use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mimojam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimojam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn theorem_check_writes_table_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("theorems.toml");
    let out = mimojam(&[
        "theorems",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let hash = stderr
        .lines()
        .find_map(|l| l.strip_prefix("config hash "))
        .expect("hash printed");
    let table = fs::read_to_string(dir.path().join("theorem_check.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.starts_with(hash)));
}

#[test]
fn mode_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("theorems.toml");
    let out = mimojam(&["learn", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mode"));
}

#[test]
fn bad_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "schema = 2\nmode = \"theorem_check\"\nseed = 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = mimojam(&["theorems", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!out_dir.join("theorem_check.csv").exists());
}

#[test]
fn missing_config_fails() {
    let out = mimojam(&["sweep", "--config", "/nonexistent/config.toml"]);
    assert!(!out.status.success());
}
