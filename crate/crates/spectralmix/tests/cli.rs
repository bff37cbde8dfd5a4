//! The `spectralmix` binary: exit codes, report files and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spectralmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectralmix"))
        .args(args)
        .env_remove("SPECTRALMIX_JOBS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BENCH: &str = "k = 2\nd = 1\ngamma = 1.0\nband = 2.0\ndurations = [250.0]\nnoise_levels = [0.0, 1e-3]\n";

#[test]
fn missing_field_exits_with_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "d = 1\ngamma = 1.0\n");
    let out = spectralmix(&["sft-bench", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`k`"), "{err}");
}

#[test]
fn unknown_field_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{BENCH}colour = 3\n"));
    let out = spectralmix(&["sft-bench", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn missing_config_file_exits_with_one() {
    let out = spectralmix(&["moments", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_schedule_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "k = 2\nd = 3\ngamma = 1.0\neps = 0.2\ndelta = 0.1\nseeds = [0]\n",
    );
    let out = spectralmix(&["learn-mixture", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn too_short_duration_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "k = 3\nd = 1\ngamma = 0.5\ndurations = [1.0]\n");
    let out = spectralmix(&["sft-bench", &cfg, "--trials", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_append_with_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BENCH);
    let csv = dir.path().join("r.csv");
    let csv_s = csv.to_str().unwrap();
    for base in ["0", "10"] {
        let out = spectralmix(&["sft-bench", &cfg, "--seed-base", base, "--trials", "2", "--out", csv_s]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,k,d,T,gamma,noise_level,freq_err_max,weight_err_max,queries,success");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")), "{text}");
    let meta = fs::read_to_string(dir.path().join("r.csv.meta.jsonl")).unwrap();
    assert_eq!(meta.lines().count(), 2);
    for line in meta.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["command"], "sft-bench");
        assert_eq!(v["wall_ms"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn json_output_is_an_array_of_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BENCH);
    let out = spectralmix(&["sft-bench", &cfg, "--trials", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.len(), 2);
    assert_eq!(v[0]["T"], 250.0);
}

#[test]
fn same_seeds_give_identical_rows_regardless_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", BENCH);
    let a = spectralmix(&["sft-bench", &cfg, "--seed-base", "5", "--trials", "4", "--jobs", "1"]);
    let b = spectralmix(&["sft-bench", &cfg, "--seed-base", "5", "--trials", "4", "--jobs", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
