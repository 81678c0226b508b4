//! End-to-end tests of the `snlevy` binary: CSV shape, exit codes,
//! determinism of the Monte Carlo subcommands.

use std::io::Write;
use std::process::{Command, Output};

use snlevy_core::killed::{self, TwoPointConfig};
use snlevy_core::{ModelSpec, ScaleEngine};

fn bm_config() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "model.sigma = 1.0\nmodel.gamma = 0.0\nmodel.jumps = none").unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snlevy"))
        .args(args)
        .output()
        .expect("failed to spawn snlevy")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_h_matches_library_value() {
    let cfg = bm_config();
    let out = run(&[
        "--model",
        cfg.path().to_str().unwrap(),
        "--a",
        "0.5",
        "eval",
        "h",
        "--q",
        "1",
        "--x",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "quantity,q,x,value");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "h");
    let value: f64 = row[3].parse().unwrap();
    let engine = ScaleEngine::new(ModelSpec::brownian(1.0, 0.0).unwrap()).unwrap();
    let want = killed::h(&engine, &TwoPointConfig::new(0.5).unwrap(), 1.0, -1.0).unwrap();
    assert!((value - want).abs() <= 1e-15 * want.abs());
}

#[test]
fn entrance_plus_with_gaussian_part_exits_3() {
    let cfg = bm_config();
    let out = run(&[
        "--model",
        cfg.path().to_str().unwrap(),
        "eval",
        "entrance",
        "--beta",
        "1",
        "--y",
        "0.0",
        "--side",
        "plus",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("upper point"), "stderr: {err}");
}

#[test]
fn argument_errors_exit_2() {
    // Unknown flag (clap) and a missing model file both map to 2.
    assert_eq!(run(&["eval", "w", "--nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["eval", "w", "--q", "1", "--x", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn bad_config_exits_2() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "model.sugma = 1.0").unwrap();
    let out = run(&[
        "--model",
        f.path().to_str().unwrap(),
        "eval",
        "phi",
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn mc_output_is_seed_deterministic() {
    let cfg = bm_config();
    let mc_args = |seed: &'static str| {
        vec![
            "--model",
            cfg.path().to_str().unwrap(),
            "--seed",
            seed,
            "mc",
            "h",
            "--q",
            "1",
            "--x",
            "0.2",
            "--paths",
            "2000",
            "--dt",
            "1e-2",
            "--horizon",
            "10",
        ]
    };
    let first = run(&mc_args("7"));
    assert_eq!(first.status.code(), Some(0));
    let again = run(&mc_args("7"));
    assert_eq!(stdout(&first), stdout(&again));
    let other = run(&mc_args("8"));
    assert_ne!(stdout(&first), stdout(&other));
    assert!(stdout(&first).starts_with("estimator,q,x,a,paths,value,std_error,bias_bound\n"));
}

#[test]
fn out_flag_writes_file() {
    let cfg = bm_config();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.csv");
    let out = run(&[
        "--model",
        cfg.path().to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
        "eval",
        "phi",
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("quantity,q,value,derivative\n"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let phi: f64 = row[2].parse().unwrap();
    assert!((phi - 2.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn gnuplot_hint_prepends_comment() {
    let cfg = bm_config();
    let out = run(&[
        "--model",
        cfg.path().to_str().unwrap(),
        "--gnuplot-hint",
        "eval",
        "w",
        "--q",
        "1",
        "--x",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("# gnuplot:"));
}
