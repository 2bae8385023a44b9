use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
[stream]
symbols = 120
seed = 4

[spectrum]
points = 300
";

fn tmasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmasim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, experiment: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.join("out");
    let mut args = vec![
        "--experiment",
        experiment,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    tmasim(&args)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn summary(dir: &Path) -> String {
    fs::read_to_string(dir.join("out/summary.txt")).unwrap()
}

#[test]
fn identical_runs_are_byte_identical() {
    for exp in ["exp-rrc", "exp-qpsk", "stepped-spectrum"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(run_in(a.path(), exp, &[]).status.success());
        assert!(run_in(b.path(), exp, &[]).status.success());
        let fa = read_dir_sorted(&a.path().join("out"));
        assert!(fa.len() >= 2, "{exp} wrote {} files", fa.len());
        assert_eq!(fa, read_dir_sorted(&b.path().join("out")), "{exp}");
    }
}

#[test]
fn expected_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let r = run_in(d.path(), "exp-rrc", &[]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let out = d.path().join("out");
    for f in [
        "weights.csv",
        "waveform.csv",
        "constellation.csv",
        "psd.csv",
        "summary.txt",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let weights = fs::read_to_string(out.join("weights.csv")).unwrap();
    assert!(weights.starts_with("index,phase_code,amp_code\n"));
    let psd = fs::read_to_string(out.join("psd.csv")).unwrap();
    assert!(psd.starts_with("f_hz,psd_db\n"));
    assert_eq!(psd.lines().count(), 301);
    let s = summary(d.path());
    assert!(s.contains("seed: 4"));
    assert!(s.contains("phase_error_rms_deg:"));
    assert!(s.contains("first_harmonic_suppression_db:"));
}

#[test]
fn flags_override_config() {
    let d = tempfile::tempdir().unwrap();
    assert!(
        run_in(d.path(), "exp-rrc", &["--seed", "77", "--bits", "4"])
            .status
            .success()
    );
    let s = summary(d.path());
    assert!(s.contains("seed: 77"), "{s}");
    assert!(
        s.contains("quantized (4 phase bits, 4 amplitude bits)"),
        "{s}"
    );

    assert!(run_in(d.path(), "exp-rrc", &["--quantized=false"])
        .status
        .success());
    let s = summary(d.path());
    assert!(s.contains("weights: exact"), "{s}");
    let weights = fs::read_to_string(d.path().join("out/weights.csv")).unwrap();
    assert!(weights.starts_with("index,re,im\n"));
}

#[test]
fn unknown_experiment_is_rejected() {
    let r = tmasim(&["--experiment", "fig-9"]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("fig-9"), "{err}");
    assert!(err.contains("exp-rrc"), "{err}");
}

#[test]
fn malformed_config_reports_line_and_field() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.toml");
    fs::write(&cfg, "[shaping]\nrolloff = 0.5\nbeta = 0.3\n").unwrap();
    let r = tmasim(&[
        "--experiment",
        "exp-rrc",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        d.path().to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("beta"), "{err}");

    fs::write(&cfg, "[stream]\nsymbols = \"many\"\n").unwrap();
    let r = tmasim(&[
        "--experiment",
        "exp-rrc",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        d.path().to_str().unwrap(),
    ]);
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line 2") && err.contains("symbols"), "{err}");
}

#[test]
fn missing_config_file_is_an_error() {
    let r = tmasim(&[
        "--experiment",
        "exp-qpsk",
        "--config",
        "/nonexistent/cfg.toml",
    ]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("/nonexistent/cfg.toml"));
}

#[test]
fn sweeps_report_every_point() {
    let d = tempfile::tempdir().unwrap();
    assert!(run_in(d.path(), "clock-sweep", &[]).status.success());
    let csv = fs::read_to_string(d.path().join("out/clock_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(summary(d.path()).contains("spread_db:"));

    assert!(run_in(d.path(), "pulse-compare", &[]).status.success());
    assert!(summary(d.path()).contains("closed_form_max_rel_error:"));
}
