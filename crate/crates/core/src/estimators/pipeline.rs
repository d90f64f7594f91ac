use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::estimators::autocorr::{estimate_nu_autocorr, AutocorrParams};
use crate::estimators::hybrid::estimate_hybrid;
use crate::estimators::sliding::{estimate_ns_sliding, SlidingParams};
use crate::estimators::substitution::{estimate_carriers_substitution, SubstitutionParams};
use crate::estimators::traversal::estimate_ns_traversal;
use crate::types::{EstimationReport, IqBuffer, Method, SymbolLengths, TraversalParams};

/// Settings for every estimation method.
///
/// The defaults suit 128-carrier recordings with a quarter cyclic prefix at
/// baseband rate. [`EstimatorParams::for_lengths`] centres every search on a
/// known configuration instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorParams {
    /// Hints below this SNR (dB) take the oversampling-first path.
    pub snr_threshold_db: f64,
    pub autocorr: AutocorrParams,
    pub sliding: SlidingParams,
    /// Traversal at the receiver rate, used by [`Method::Traversal`].
    pub traversal: TraversalParams,
    pub substitution: SubstitutionParams,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            snr_threshold_db: -5.0,
            autocorr: AutocorrParams::new(320),
            sliding: SlidingParams::default(),
            traversal: TraversalParams::default(),
            substitution: SubstitutionParams::default(),
        }
    }
}

impl EstimatorParams {
    /// Search bounds centred on known lengths: lag search up to 2.5 `n_u`,
    /// traversal ranges ±25% around `n_s` and `n_os`.
    pub fn for_lengths(truth: &SymbolLengths) -> Self {
        EstimatorParams {
            autocorr: AutocorrParams::around(truth.n_u),
            sliding: SlidingParams::for_lengths(truth.n_u, truth.n_g),
            traversal: TraversalParams::around(truth.n_s),
            substitution: SubstitutionParams {
                traversal: TraversalParams::around(truth.n_os()),
                ..SubstitutionParams::default()
            },
            ..EstimatorParams::default()
        }
    }
}

/// Runs one method. `snr_hint_db` is only read by [`Method::Hybrid`].
///
/// The sliding method has no useful length of its own and takes it from the
/// lag-correlation argmax first.
pub fn run_method(
    signal: &IqBuffer,
    method: Method,
    snr_hint_db: f64,
    params: &EstimatorParams,
) -> Result<EstimationReport> {
    let mut report = EstimationReport::empty(method);
    match method {
        Method::Autocorr => {
            report.n_u_hat = Some(estimate_nu_autocorr(signal, &params.autocorr)?);
        }
        Method::Sliding => {
            let n_u = estimate_nu_autocorr(signal, &params.autocorr)?;
            report.n_u_hat = Some(n_u);
            report.n_s_hat = Some(estimate_ns_sliding(signal, n_u, &params.sliding)?);
        }
        Method::Traversal => {
            let out = estimate_ns_traversal(signal, &params.traversal)?;
            report.n_s_hat = Some(out.n_s);
            report.accepted_lengths = out.accepted;
        }
        Method::Substitution => {
            report = estimate_carriers_substitution(signal, &params.substitution)?;
        }
        Method::Hybrid => {
            report = estimate_hybrid(signal, snr_hint_db, params)?;
        }
    }
    Ok(report)
}
