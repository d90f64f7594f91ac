//! Monte-Carlo SNR sweeps.
//!
//! Every trial synthesizes a fresh recording from a seed derived from the
//! master seed, the SNR index and the trial index, runs each requested method
//! on it and scores the estimates against the known lengths. Trials run in
//! parallel; results do not depend on scheduling.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::pipeline::{run_method, EstimatorParams};
use crate::synth::{derive_seed, synthesize};
use crate::types::{EstimationReport, Method, OfdmConfig, SymbolLengths};

/// Schema version accepted by [`SweepSpec`].
pub const SWEEP_SPEC_VERSION: u32 = 1;

/// SNR hint passed to the hybrid selector for noiseless grid points.
pub const NOISELESS_HINT_DB: f64 = 300.0;

/// Estimated quantity scored by a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "n_s")]
    NS,
    #[serde(rename = "n_u")]
    NU,
    #[serde(rename = "n_cn")]
    NCn,
    #[serde(rename = "q")]
    Q,
}

impl Parameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parameter::NS => "n_s",
            Parameter::NU => "n_u",
            Parameter::NCn => "n_cn",
            Parameter::Q => "q",
        }
    }

    pub fn truth(&self, t: &SymbolLengths) -> usize {
        match self {
            Parameter::NS => t.n_s,
            Parameter::NU => t.n_u,
            Parameter::NCn => t.n_cn,
            Parameter::Q => t.q,
        }
    }

    pub fn estimate(&self, r: &EstimationReport) -> Option<usize> {
        match self {
            Parameter::NS => r.n_s_hat,
            Parameter::NU => r.n_u_hat,
            Parameter::NCn => r.n_cn_hat,
            Parameter::Q => r.q_hat,
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters a method is scored on.
pub fn scored_parameters(method: Method) -> &'static [Parameter] {
    match method {
        Method::Autocorr => &[Parameter::NU],
        Method::Sliding | Method::Traversal => &[Parameter::NS],
        Method::Substitution | Method::Hybrid => {
            &[Parameter::NS, Parameter::NU, Parameter::NCn, Parameter::Q]
        }
    }
}

/// A sweep definition, read from versioned JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub version: u32,
    /// Generation settings; its `snr_db` and `seed` are ignored.
    pub base_config: OfdmConfig,
    /// SNR points in dB, ascending. `null` is a noiseless point and sorts last.
    pub snr_grid_db: Vec<Option<f64>>,
    pub trials_per_point: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub exact_match_tolerance: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Estimator settings. Absent means searches centred on the base config.
    #[serde(default)]
    pub params: Option<EstimatorParams>,
}

fn snr_key(s: Option<f64>) -> f64 {
    s.unwrap_or(f64::INFINITY)
}

impl SweepSpec {
    /// A spec over `base` with default tolerance, seed and parameters.
    pub fn new(base: OfdmConfig, snr_grid_db: Vec<Option<f64>>, trials: usize, methods: Vec<Method>) -> Self {
        SweepSpec {
            version: SWEEP_SPEC_VERSION,
            base_config: base,
            snr_grid_db,
            trials_per_point: trials,
            methods,
            exact_match_tolerance: 0,
            master_seed: 0,
            params: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("sweep spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<SymbolLengths> {
        if self.version != SWEEP_SPEC_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported sweep spec version {} (expected {SWEEP_SPEC_VERSION})",
                self.version
            )));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidConfig("snr_grid_db is empty".into()));
        }
        if self.snr_grid_db.iter().flatten().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("snr_grid_db entries must be finite".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| snr_key(w[0]) > snr_key(w[1])) {
            return Err(Error::InvalidConfig("snr_grid_db must be sorted".into()));
        }
        if self.trials_per_point == 0 {
            return Err(Error::InvalidConfig("trials_per_point must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("methods is empty".into()));
        }
        self.base_config.clone().with_snr(None).validate()
    }

    /// Estimator settings used by the sweep.
    pub fn estimator_params(&self) -> Result<EstimatorParams> {
        match &self.params {
            Some(p) => Ok(p.clone()),
            None => Ok(EstimatorParams::for_lengths(&self.base_config.validate()?)),
        }
    }
}

/// One (SNR, method, parameter) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `None` for a noiseless point.
    pub snr_db: Option<f64>,
    pub method: Method,
    pub parameter: Parameter,
    pub accuracy: f64,
    pub amplitude_error: f64,
    pub trials: usize,
    pub failures: usize,
}

/// Score of one estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialScore {
    pub hit: bool,
    pub ae: f64,
    pub failed: bool,
}

/// Scores an estimate against the truth. A missing estimate is a miss with
/// relative error 1.
pub fn score_estimate(estimate: Option<usize>, truth: usize, tolerance: usize) -> TrialScore {
    match estimate {
        Some(e) => TrialScore {
            hit: e.abs_diff(truth) <= tolerance,
            ae: e.abs_diff(truth) as f64 / truth as f64,
            failed: false,
        },
        None => TrialScore {
            hit: false,
            ae: 1.0,
            failed: true,
        },
    }
}

/// Scores every parameter of a method's report; `None` is a failed run.
pub fn score_trial(
    report: Option<&EstimationReport>,
    method: Method,
    truth: &SymbolLengths,
    tolerance: usize,
) -> Vec<(Parameter, TrialScore)> {
    scored_parameters(method)
        .iter()
        .map(|&p| {
            let est = report.and_then(|r| p.estimate(r));
            (p, score_estimate(est, p.truth(truth), tolerance))
        })
        .collect()
}

/// Accuracy and mean relative error over a set of scores.
pub fn aggregate(scores: &[TrialScore]) -> (f64, f64) {
    if scores.is_empty() {
        return (0.0, 0.0);
    }
    let n = scores.len() as f64;
    let hits = scores.iter().filter(|s| s.hit).count() as f64;
    let ae = scores.iter().map(|s| s.ae).sum::<f64>() / n;
    (hits / n, ae)
}

/// Reports of every requested method on one trial. Errors other than
/// estimation failures abort the sweep.
fn run_trial(
    spec: &SweepSpec,
    params: &EstimatorParams,
    snr_idx: usize,
    trial: usize,
) -> Result<Vec<Option<EstimationReport>>> {
    let snr = spec.snr_grid_db[snr_idx];
    let cfg = spec
        .base_config
        .clone()
        .with_snr(snr)
        .with_seed(derive_seed(spec.master_seed, &[snr_idx as u64, trial as u64]));
    let syn = synthesize(&cfg)?;
    let hint = snr.unwrap_or(NOISELESS_HINT_DB);
    spec.methods
        .iter()
        .map(|&m| match run_method(&syn.signal, m, hint, params) {
            Ok(r) => Ok(Some(r)),
            Err(e) if e.is_estimation_failure() => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Runs a sweep. Rows come out grouped by SNR, then method in spec order,
/// then parameter.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with_progress(spec, |_| {})
}

/// [`run_sweep`] that hands the rows of each finished SNR point to `progress`.
pub fn run_sweep_with_progress(
    spec: &SweepSpec,
    mut progress: impl FnMut(&[SweepRow]),
) -> Result<Vec<SweepRow>> {
    let truth = spec.validate()?;
    let params = spec.estimator_params()?;
    let mut rows = Vec::new();
    for (snr_idx, &snr) in spec.snr_grid_db.iter().enumerate() {
        let trials: Vec<Vec<Option<EstimationReport>>> = (0..spec.trials_per_point)
            .into_par_iter()
            .map(|t| run_trial(spec, &params, snr_idx, t))
            .collect::<Result<_>>()?;
        let start = rows.len();
        for (mi, &method) in spec.methods.iter().enumerate() {
            for &p in scored_parameters(method) {
                let scores: Vec<TrialScore> = trials
                    .iter()
                    .map(|reports| {
                        let est = reports[mi].as_ref().and_then(|r| p.estimate(r));
                        score_estimate(est, p.truth(&truth), spec.exact_match_tolerance)
                    })
                    .collect();
                let (accuracy, amplitude_error) = aggregate(&scores);
                rows.push(SweepRow {
                    snr_db: snr,
                    method,
                    parameter: p,
                    accuracy,
                    amplitude_error,
                    trials: scores.len(),
                    failures: scores.iter().filter(|s| s.failed).count(),
                });
            }
        }
        progress(&rows[start..]);
    }
    Ok(rows)
}

/// Formats a real like C's `%g` with six significant digits.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "snr_db,method,parameter,accuracy,amplitude_error,trials,failures";

/// Writes rows as CSV with an LF-terminated header.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_g(snr_key(r.snr_db)),
            r.method,
            r.parameter,
            format_g(r.accuracy),
            format_g(r.amplitude_error),
            r.trials,
            r.failures
        )?;
    }
    Ok(())
}

/// CSV text for a set of rows.
pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii csv")
}
