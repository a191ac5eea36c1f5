mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::REFERENCE_ORACLE;

fn spdc(args: &[&str], config: &Path, out: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spdc"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("SPDC_THREADS", threads)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn oracle_writes_comparison_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("oracle.ini");
    fs::write(&config, REFERENCE_ORACLE).unwrap();
    let out = dir.path().join("out");
    let o = spdc(&["oracle"], &config, &out, "2");
    assert!(o.status.success(), "{}", stderr(&o));
    let comparison = fs::read_to_string(out.join("comparison.csv")).unwrap();
    let rel: f64 = comparison
        .lines()
        .find_map(|l| l.strip_prefix("relative_l2,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel < 1e-2);
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.starts_with("spdc "));
    assert!(manifest.contains("command oracle"));
    for name in ["comparison.csv", "direct.dump", "analytic.dump"] {
        let bytes = fs::read(out.join(name)).unwrap();
        let line = format!("output {name} {}", spdc::run::sha256_hex(&bytes));
        assert!(manifest.contains(&line), "missing {line}");
    }
}

#[test]
fn every_subcommand_runs_on_shipped_configs() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for (file, commands) in [
        ("reference_oracle.ini", &["simulate", "schmidt", "phasematch"][..]),
        ("gaussian_spectral.ini", &["simulate", "schmidt", "phasematch"][..]),
        ("spatial_epr.ini", &["simulate", "epr", "schmidt"][..]),
    ] {
        for cmd in commands {
            let out = dir.path().join(format!("{file}-{cmd}"));
            let o = spdc(&[cmd], &root.join(file), &out, "2");
            assert!(o.status.success(), "{file} {cmd}: {}", stderr(&o));
            assert!(out.join("manifest.txt").exists());
        }
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        let o = spdc(&["epr"], &root.join("spatial_epr.ini"), &out, threads);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(fs::read(out.join("correlations.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn invalid_config_reports_code_and_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.ini");
    fs::write(&config, REFERENCE_ORACLE.replace("L = 1e-5", "L = -1")).unwrap();
    let o = spdc(&["simulate"], &config, &dir.path().join("out"), "1");
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.starts_with("spdc: error: VALIDATION_ERROR: "), "{err}");
    assert!(err.contains("crystal.L"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn parse_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.ini");
    fs::write(&config, "[pump]\nvariant = plane_wave\nbogus = 1\n").unwrap();
    let o = spdc(&["simulate"], &config, &dir.path().join("out"), "1");
    let err = stderr(&o);
    assert!(err.starts_with("spdc: error: PARSE_ERROR: line 3"), "{err}");
}

#[test]
fn epr_on_spectral_grid_is_a_mode_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("oracle.ini");
    fs::write(&config, REFERENCE_ORACLE).unwrap();
    let o = spdc(&["epr"], &config, &dir.path().join("out"), "1");
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("spdc: error: MODE_MISMATCH: "), "{}", stderr(&o));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = spdc(&["simulate"], &dir.path().join("absent.ini"), &dir.path().join("out"), "1");
    assert!(stderr(&o).starts_with("spdc: error: IO_ERROR: "), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("oracle.ini");
    fs::write(&config, REFERENCE_ORACLE).unwrap();
    let o = spdc(&["simulate"], &config, &dir.path().join("out"), "0");
    assert!(stderr(&o).starts_with("spdc: error: INVALID_INPUT: "), "{}", stderr(&o));
}
