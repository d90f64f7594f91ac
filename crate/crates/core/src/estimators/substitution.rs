use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::oversampling::{estimate_oversampling, OversamplingParams};
use crate::estimators::traversal::estimate_ns_traversal;
use crate::synth::decimate;
use crate::types::{EstimationReport, IqBuffer, Method, TraversalParams};

/// Settings of the oversampling-first estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SubstitutionParams {
    pub oversampling: OversamplingParams,
    /// Traversal over the decimated signal; lengths are in baseband samples.
    pub traversal: TraversalParams,
}

/// Carrier count for a baseband symbol length: the largest power of two not
/// above it.
pub fn carriers_from_n_os(n_os: usize) -> Result<usize> {
    if n_os < 2 {
        return Err(Error::failed(
            "substitution",
            format!("symbol length {n_os} too short"),
        ));
    }
    Ok(1 << n_os.ilog2())
}

/// Estimates the oversampling rate, decimates to baseband, traverses for the
/// baseband symbol length and derives the carrier count from it.
///
/// Every field of the report is filled on success; the receiver-rate lengths
/// are the baseband ones scaled by the estimated rate.
pub fn estimate_carriers_substitution(
    signal: &IqBuffer,
    params: &SubstitutionParams,
) -> Result<EstimationReport> {
    let q = estimate_oversampling(signal, &params.oversampling)?.q;
    let baseband = if q > 1 {
        decimate(signal, q)?
    } else {
        signal.clone()
    };
    let out = estimate_ns_traversal(&baseband, &params.traversal)?;
    let n_cn = carriers_from_n_os(out.n_s)?;
    Ok(EstimationReport {
        n_s_hat: Some(q * out.n_s),
        n_u_hat: Some(q * n_cn),
        q_hat: Some(q),
        n_cn_hat: Some(n_cn),
        n_os_hat: Some(out.n_s),
        method_used: Method::Substitution,
        accepted_lengths: out.accepted,
    })
}
