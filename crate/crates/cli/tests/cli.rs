use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nonfloquet_core::diagnostics::output::parse_spectrum_csv;
use serde_json::Value;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonfloquet"));
    cmd.args(args).env_remove("NONFLOQUET_THREADS");
    if let Some(t) = threads {
        cmd.env("NONFLOQUET_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_CHAIN: &str = r#"{
  "model": "bipartite_chain", "variant": "hermitian_counterpart", "boundary": "open", "L": 4, "omega": 0.5,
  "params": { "t1": 0.05, "t2": 0.5, "p": -0.1, "mu0": -1.0 }
}"#;

#[test]
fn winding_report_for_the_topological_counterpart() {
    let out = run(&["winding", "--model", &model("counterpart_momentum.json"), "--mu0", "-1", "--nk", "256"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["W1"], 1);
    assert_eq!(v["W2"], 1);
    assert_eq!(v["nu0"].as_f64(), Some(1.0));
    assert_eq!(v["nu_pi"].as_f64(), Some(0.0));
}

#[test]
fn symmetric_quench_reports_flat_real_bands() {
    let out = run(&["quench", "--model", &model("quench7.json"), "--r", "0.0"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["flat"], true);
    assert_eq!(v["real"], true);
}

#[test]
fn spectrum_csv_written_atomically_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "chain.json", SMALL_CHAIN);
    let out_path = dir.path().join("spec.csv");
    let out = run(&["spectrum", "--model", &m, "--out", out_path.to_str().unwrap(), "--slices", "512"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("index,re_eps,im_eps,I_j\n"));
    let rows = parse_spectrum_csv(&text).unwrap();
    assert_eq!(rows.len(), 8);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn identical_configuration_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "chain.json", SMALL_CHAIN);
    let args = ["sweep", "--model", &m, "--mu0-grid", "-1:0:5", "--slices", "256"];
    let a = run(&args, Some("1"));
    let b = run(&args, Some("3"));
    let c = run(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let json = [&args[..], &["--format", "json"]].concat();
    assert_eq!(run(&json, Some("1")).stdout, run(&json, Some("2")).stdout);
}

#[test]
fn csv_floats_have_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "chain.json", SMALL_CHAIN);
    let out = run(&["spectrum", "--model", &m, "--slices", "256"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    for cell in row.split(',').skip(1) {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{cell}");
    }
}

#[test]
fn phase_study_accepts_pi_suffixes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "chain.json", SMALL_CHAIN);
    let out = run(&["phase-study", "--model", &m, "--phi-grid", "0.3pi,1.2pi", "--slices", "512", "--format", "json"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["max_spectral_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"model":"stark_chain","N":10,"params":{"tL":1,"tR":1,"alpha":0},"x":1}"#);
    let cases: Vec<Vec<String>> = vec![
        vec!["spectrum".into()],
        vec!["no-such-command".into()],
        vec!["spectrum".into(), "--model".into(), dir.path().join("missing.json").to_string_lossy().into_owned()],
        vec!["stark".into(), "--model".into(), bad],
        vec!["sweep".into(), "--model".into(), model("counterpart_open.json")],
        vec!["winding".into(), "--model".into(), model("counterpart_momentum.json"), "--nk".into(), "0".into()],
        vec!["spectrum".into(), "--model".into(), model("stark.json")],
        vec!["spectrum".into(), "--model".into(), model("skin_chain.json"), "--format".into(), "xml".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&refs, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(&["quench", "--model", &model("quench7.json")], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lossy.json", r#"{"model":"step_quench","params":{"J":1,"gamma_im":700}}"#);
    let out = run(&["spectrum", "--model", &m], None);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["spectrum", "sweep", "phase-study", "winding", "freqspace", "stark", "deform-check", "quench"] {
        assert!(text.contains(sub), "{sub}");
    }
}

#[test]
fn deform_check_on_the_skin_chain() {
    let out = run(&["deform-check", "--model", &model("skin_chain.json"), "--slices", "2048"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["transformed_hermitian"], true);
    assert!((v["shift_re"].as_f64().unwrap().abs() - 0.25).abs() < 1e-12);
    assert!(v["spectral_deviation"].as_f64().unwrap() < 1e-5);
}

#[test]
fn in_process_entry_point_matches_exit_codes() {
    assert_eq!(nonfloquet_cli::run_cli(["nonfloquet", "spectrum"]), nonfloquet_cli::EXIT_CONFIG);
    assert_eq!(nonfloquet_cli::run_cli(["nonfloquet", "--version"]), nonfloquet_cli::EXIT_OK);
}
