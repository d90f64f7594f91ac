use std::path::Path;
use std::process::{Command, Output};

use ofdm_blind::cli::{load_config, quantize_f32, read_iq};
use ofdm_blind::harness::SweepSpec;
use ofdm_blind::synthesize;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ofdm-blind");

fn manifest(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &TempDir, config: &str) -> std::path::PathBuf {
    let out = dir.path().join("rec.iq");
    let cfg = manifest(config);
    let o = run(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn estimate(path: &Path, extra: &[&str]) -> serde_json::Value {
    let mut args = vec!["estimate", "--in", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_slice(&o.stdout).expect("estimate prints JSON")
}

#[test]
fn synth_writes_cf32_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 3200 * 8);
    assert!(dir.path().join("rec.meta.json").exists());
}

#[test]
fn round_trip_is_bit_exact_after_f32_rounding() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    let cfg = load_config(&manifest("configs/reference.json")).unwrap();
    let (back, meta) = read_iq(&path).unwrap();
    assert_eq!(back, quantize_f32(&synthesize(&cfg).unwrap().signal));
    assert_eq!(meta.truth, Some(cfg));
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = run(&[
        "synth",
        "--config",
        "/definitely/not/here.json",
        "--out",
        "/tmp/unused.iq",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config not found"), "{}", stderr(&o));
}

#[test]
fn odd_byte_count_is_malformed() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&path, bytes).unwrap();
    let o = run(&["estimate", "--in", path.to_str().unwrap(), "--snr-hint", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed IQ file"), "{}", stderr(&o));
}

#[test]
fn auto_without_hint_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    let o = run(&["estimate", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn high_hint_takes_the_correlation_path() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    let v = estimate(&path, &["--snr-hint", "10"]);
    assert_eq!(v["failed"], false);
    assert_eq!(v["n_s_hat"], 160);
    assert_eq!(v["n_u_hat"], 128);
    assert_eq!(v["symbol_rate_hz"], 250000.0);
}

#[test]
fn low_hint_takes_the_substitution_path() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/oversampled_q4.json");
    let v = estimate(&path, &["--snr-hint", "-20"]);
    assert_eq!(v["failed"], false);
    assert_eq!(v["n_cn_hat"], 128);
    assert_eq!(v["q_hat"], 4);
    assert!(!v["accepted_lengths"].as_array().unwrap().is_empty());
}

#[test]
fn explicit_method_reports_only_its_lengths() {
    let dir = TempDir::new().unwrap();
    let path = synth(&dir, "configs/reference.json");
    let v = estimate(&path, &["--method", "autocorr"]);
    assert_eq!(v["method_used"], "autocorr");
    assert_eq!(v["n_u_hat"], 128);
    assert!(v["n_s_hat"].is_null());
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let mut spec =
        SweepSpec::from_json(&std::fs::read_to_string(manifest("sweeps/reference.json")).unwrap()).unwrap();
    spec.snr_grid_db = vec![Some(5.0)];
    spec.trials_per_point = 1;
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();

    let csv = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "sweep",
            "--spec",
            spec_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "17",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = csv("a.csv");
    let b = csv("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    // autocorr 1 + sliding 1 + traversal 1 + substitution 4 + hybrid 4, plus the header
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("snr_db,method,parameter,accuracy,amplitude_error,trials,failures\n"));
}

#[test]
fn bundled_sweep_spec_is_valid() {
    let spec =
        SweepSpec::from_json(&std::fs::read_to_string(manifest("sweeps/reference.json")).unwrap()).unwrap();
    assert_eq!(spec.snr_grid_db.len(), 51);
    assert_eq!(spec.snr_grid_db.first(), Some(&Some(-40.0)));
    assert_eq!(spec.snr_grid_db.last(), Some(&Some(10.0)));
    assert_eq!(spec.methods.len(), 5);
}
