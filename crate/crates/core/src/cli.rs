//! The `ofdm-blind` command line and its file formats.
//!
//! IQ recordings are raw little-endian `f32` pairs (I then Q) with a JSON
//! sidecar next to them holding the sample rate and, for synthesized files,
//! the generating config.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::estimators::pipeline::{run_method, EstimatorParams};
use crate::harness::{run_sweep_with_progress, write_csv, SweepSpec};
use crate::synth::synthesize;
use crate::types::{EstimationReport, IqBuffer, Method, OfdmConfig, SymbolLengths};

pub const CONFIG_VERSION: u32 = 1;
pub const IQ_FORMAT_TAG: &str = "cf32le/v1";

/// Exit code for usage and IO errors.
pub const EXIT_USAGE: i32 = 2;

/// A failure that ends the command with [`EXIT_USAGE`].
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = std::result::Result<T, CliError>;

fn err(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// Versioned wrapper around a generation config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub ofdm: OfdmConfig,
}

/// Sidecar metadata of an IQ recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IqFileMeta {
    pub format_tag: String,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub truth: Option<OfdmConfig>,
    #[serde(default)]
    pub lengths: Option<SymbolLengths>,
}

/// Path of the sidecar for a recording: the extension becomes `.meta.json`.
pub fn sidecar_path(iq_path: &Path) -> PathBuf {
    iq_path.with_extension("meta.json")
}

pub fn load_config(path: &Path) -> CliResult<OfdmConfig> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(err(format!("config not found: {}", path.display())))
        }
        Err(e) => return Err(err(format!("cannot read config {}: {e}", path.display()))),
    };
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|e| err(format!("invalid config {}: {e}", path.display())))?;
    if file.version != CONFIG_VERSION {
        return Err(err(format!(
            "unsupported config version {} (expected {CONFIG_VERSION})",
            file.version
        )));
    }
    file.ofdm
        .validate()
        .map_err(|e| err(format!("invalid config {}: {e}", path.display())))?;
    Ok(file.ofdm)
}

/// Rounds every component to `f32`, the precision of the file format.
pub fn quantize_f32(buf: &IqBuffer) -> IqBuffer {
    let samples = buf
        .samples()
        .iter()
        .map(|z| Complex64::new(z.re as f32 as f64, z.im as f32 as f64))
        .collect();
    IqBuffer::new(samples, buf.sample_rate_hz()).expect("rounding keeps samples finite")
}

pub fn encode_iq(buf: &IqBuffer) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(buf.len() * 8);
    for z in buf.samples() {
        bytes.extend_from_slice(&(z.re as f32).to_le_bytes());
        bytes.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    bytes
}

pub fn decode_iq(bytes: &[u8], sample_rate_hz: f64) -> CliResult<IqBuffer> {
    if bytes.is_empty() || !bytes.len().is_multiple_of(8) {
        return Err(err(format!(
            "malformed IQ file: {} bytes is not a positive multiple of 8",
            bytes.len()
        )));
    }
    let f = |c: &[u8]| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
    let samples = bytes
        .chunks_exact(8)
        .map(|c| Complex64::new(f(&c[..4]), f(&c[4..])))
        .collect();
    IqBuffer::new(samples, sample_rate_hz).map_err(|e| err(format!("malformed IQ file: {e}")))
}

pub fn write_iq(path: &Path, buf: &IqBuffer, meta: &IqFileMeta) -> CliResult<()> {
    fs::write(path, encode_iq(buf)).map_err(|e| err(format!("cannot write {}: {e}", path.display())))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(meta).expect("metadata serializes");
    fs::write(&side, json + "\n").map_err(|e| err(format!("cannot write {}: {e}", side.display())))
}

pub fn read_iq(path: &Path) -> CliResult<(IqBuffer, IqFileMeta)> {
    let bytes = fs::read(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side)
        .map_err(|e| err(format!("cannot read metadata {}: {e}", side.display())))?;
    let meta: IqFileMeta =
        serde_json::from_str(&text).map_err(|e| err(format!("invalid metadata {}: {e}", side.display())))?;
    if meta.format_tag != IQ_FORMAT_TAG {
        return Err(err(format!("unsupported IQ format tag {:?}", meta.format_tag)));
    }
    Ok((decode_iq(&bytes, meta.sample_rate_hz)?, meta))
}

/// Machine-readable result of `estimate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub method_used: Method,
    pub failed: bool,
    pub reason: Option<String>,
    pub n_s_hat: Option<usize>,
    pub n_u_hat: Option<usize>,
    pub q_hat: Option<usize>,
    pub n_cn_hat: Option<usize>,
    pub n_os_hat: Option<usize>,
    pub symbol_rate_hz: Option<f64>,
    pub useful_symbol_time_s: Option<f64>,
    pub accepted_lengths: Vec<usize>,
}

impl EstimateOutput {
    pub fn from_report(r: &EstimationReport, sample_rate_hz: f64) -> Self {
        EstimateOutput {
            method_used: r.method_used,
            failed: false,
            reason: None,
            n_s_hat: r.n_s_hat,
            n_u_hat: r.n_u_hat,
            q_hat: r.q_hat,
            n_cn_hat: r.n_cn_hat,
            n_os_hat: r.n_os_hat,
            symbol_rate_hz: r.n_s_hat.map(|n| sample_rate_hz / n as f64),
            useful_symbol_time_s: r.n_u_hat.map(|n| n as f64 / sample_rate_hz),
            accepted_lengths: r.accepted_lengths.clone(),
        }
    }

    pub fn failure(method: Method, reason: String) -> Self {
        EstimateOutput {
            failed: true,
            reason: Some(reason),
            ..EstimateOutput::from_report(&EstimationReport::empty(method), 1.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Hybrid selector driven by `--snr-hint`.
    Auto,
    Autocorr,
    Sliding,
    Traversal,
    Substitution,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            MethodArg::Auto => Method::Hybrid,
            MethodArg::Autocorr => Method::Autocorr,
            MethodArg::Sliding => Method::Sliding,
            MethodArg::Traversal => Method::Traversal,
            MethodArg::Substitution => Method::Substitution,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ofdm-blind",
    version,
    about = "Blind OFDM symbol parameter estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an IQ recording and its metadata sidecar from a JSON config.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate symbol parameters of a recording and print them as JSON.
    Estimate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// SNR in dB used by `auto` to pick a path.
        #[arg(long, allow_hyphen_values = true)]
        snr_hint: Option<f64>,
        /// Accepted for interface symmetry; every estimator is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON file with estimator settings.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Run a Monte-Carlo sweep and write the CSV.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn cmd_synth(config: &Path, out: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(config)?;
    let syn = synthesize(&cfg).map_err(|e| err(e.to_string()))?;
    let meta = IqFileMeta {
        format_tag: IQ_FORMAT_TAG.into(),
        sample_rate_hz: cfg.sample_rate_hz,
        truth: Some(cfg),
        lengths: Some(syn.truth),
    };
    write_iq(out, &syn.signal, &meta)?;
    writeln!(stdout, "wrote {} samples to {}", syn.signal.len(), out.display())
        .map_err(|e| err(e.to_string()))
}

pub fn cmd_estimate(
    input: &Path,
    method: MethodArg,
    snr_hint: Option<f64>,
    params: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<EstimateOutput> {
    let (buf, meta) = read_iq(input)?;
    let params = match params {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| err(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<EstimatorParams>(&text)
                .map_err(|e| err(format!("invalid params {}: {e}", p.display())))?
        }
        None => EstimatorParams::default(),
    };
    let hint = match (method, snr_hint) {
        (MethodArg::Auto, None) => return Err(err("--method auto needs --snr-hint")),
        (_, Some(h)) if !h.is_finite() => return Err(err("--snr-hint must be finite")),
        (_, h) => h.unwrap_or(0.0),
    };
    let m = method.method();
    let out = match run_method(&buf, m, hint, &params) {
        Ok(r) => EstimateOutput::from_report(&r, meta.sample_rate_hz),
        Err(e) if e.is_estimation_failure() => EstimateOutput::failure(m, e.to_string()),
        Err(e) => return Err(err(e.to_string())),
    };
    let json = serde_json::to_string_pretty(&out).expect("output serializes");
    writeln!(stdout, "{json}").map_err(|e| err(e.to_string()))?;
    Ok(out)
}

pub fn cmd_sweep(spec: &Path, out: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match fs::read_to_string(spec) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(err(format!("spec not found: {}", spec.display())))
        }
        Err(e) => return Err(err(format!("cannot read {}: {e}", spec.display()))),
    };
    let mut spec = SweepSpec::from_json(&text).map_err(|e| err(e.to_string()))?;
    if let Some(s) = seed {
        spec.master_seed = s;
    }
    let rows = run_sweep_with_progress(&spec, |rows| {
        let snr = rows[0]
            .snr_db
            .map_or("noiseless".to_string(), |s| format!("{s} dB"));
        let cells: Vec<String> = rows
            .iter()
            .map(|r| format!("{}/{}={:.3}", r.method, r.parameter, r.accuracy))
            .collect();
        let _ = writeln!(stdout, "{snr}: {}", cells.join(" "));
    })
    .map_err(|e| err(e.to_string()))?;
    let file = fs::File::create(out).map_err(|e| err(format!("cannot write {}: {e}", out.display())))?;
    write_csv(&rows, io::BufWriter::new(file))
        .map_err(|e| err(format!("cannot write {}: {e}", out.display())))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Synth { config, out } => cmd_synth(&config, &out, stdout),
        Command::Estimate {
            input,
            method,
            snr_hint,
            seed: _,
            params,
        } => cmd_estimate(&input, method, snr_hint, params.as_deref(), stdout).map(|_| ()),
        Command::Sweep { spec, out, seed } => cmd_sweep(&spec, &out, seed, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iq_bytes_round_trip() {
        let buf = IqBuffer::new(vec![Complex64::new(0.5, -1.25), Complex64::new(3.0e-3, 7.0)], 1e6).unwrap();
        let back = decode_iq(&encode_iq(&buf), 1e6).unwrap();
        assert_eq!(back, quantize_f32(&buf));
    }

    #[test]
    fn odd_byte_counts_are_malformed() {
        for n in [0, 3, 9, 15] {
            let e = decode_iq(&vec![0u8; n], 1.0).unwrap_err();
            assert!(e.0.contains("malformed IQ file"), "{e}");
        }
    }

    #[test]
    fn sidecar_replaces_extension() {
        assert_eq!(sidecar_path(Path::new("a/rec.iq")), Path::new("a/rec.meta.json"));
        assert_eq!(sidecar_path(Path::new("rec")), Path::new("rec.meta.json"));
    }

    #[test]
    fn quantize_is_idempotent() {
        let buf = IqBuffer::new(vec![Complex64::new(0.1, 0.2)], 1.0).unwrap();
        let q = quantize_f32(&buf);
        assert_ne!(q, buf);
        assert_eq!(quantize_f32(&q), q);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let cfg = ConfigFile {
            version: 1,
            ofdm: OfdmConfig::default(),
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ConfigFile>(&text).unwrap(), cfg);
        let bad = text.replacen('{', "{\"typo\":0,", 1);
        assert!(serde_json::from_str::<ConfigFile>(&bad).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut out = Vec::new();
        let mut errs = Vec::new();
        assert_eq!(run(["ofdm-blind", "frobnicate"], &mut out, &mut errs), 2);
        let code = run(
            [
                "ofdm-blind",
                "synth",
                "--config",
                "/nonexistent.json",
                "--out",
                "/tmp/x.iq",
            ],
            &mut out,
            &mut errs,
        );
        assert_eq!(code, 2);
        assert!(String::from_utf8_lossy(&errs).contains("config not found"));
    }
}
