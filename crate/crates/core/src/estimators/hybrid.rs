use crate::error::{Error, Result};
use crate::estimators::autocorr::estimate_nu_autocorr;
use crate::estimators::oversampling::estimate_oversampling;
use crate::estimators::pipeline::EstimatorParams;
use crate::estimators::sliding::estimate_ns_sliding;
use crate::estimators::substitution::estimate_carriers_substitution;
use crate::types::{EstimationReport, IqBuffer, Method};

/// Correlation path: useful length from the lag argmax, symbol length from
/// the sliding correlation, rate from the lag-1 spectrum.
pub fn estimate_correlation_path(signal: &IqBuffer, params: &EstimatorParams) -> Result<EstimationReport> {
    let n_u = estimate_nu_autocorr(signal, &params.autocorr)?;
    let n_s = estimate_ns_sliding(signal, n_u, &params.sliding)?;
    let q = estimate_oversampling(signal, &params.substitution.oversampling)?.q;
    let per_rate = n_u / q;
    if per_rate < 2 {
        return Err(Error::failed(
            "hybrid",
            format!("useful length {n_u} below rate {q}"),
        ));
    }
    Ok(EstimationReport {
        n_s_hat: Some(n_s),
        n_u_hat: Some(n_u),
        q_hat: Some(q),
        n_cn_hat: Some(1 << per_rate.ilog2()),
        n_os_hat: Some(n_s / q),
        method_used: Method::Hybrid,
        accepted_lengths: Vec::new(),
    })
}

/// Picks the correlation path when the SNR hint reaches the threshold and the
/// oversampling-first path below it.
pub fn estimate_hybrid(
    signal: &IqBuffer,
    snr_hint_db: f64,
    params: &EstimatorParams,
) -> Result<EstimationReport> {
    if !snr_hint_db.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "SNR hint must be finite, got {snr_hint_db}"
        )));
    }
    if snr_hint_db >= params.snr_threshold_db {
        estimate_correlation_path(signal, params)
    } else {
        let mut r = estimate_carriers_substitution(signal, &params.substitution)?;
        r.method_used = Method::Hybrid;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize;
    use crate::types::OfdmConfig;

    #[test]
    fn high_snr_path_on_reference() {
        let s = synthesize(&OfdmConfig::default().with_seed(3).with_snr(Some(10.0)))
            .unwrap()
            .signal;
        let r = estimate_hybrid(&s, 10.0, &EstimatorParams::default()).unwrap();
        assert_eq!(r.n_u_hat, Some(128));
        assert_eq!(r.n_s_hat, Some(160));
        assert_eq!(r.q_hat, Some(1));
        assert_eq!(r.n_cn_hat, Some(128));
        assert!(r.accepted_lengths.is_empty());
    }

    #[test]
    fn threshold_itself_takes_correlation_path() {
        let s = synthesize(&OfdmConfig::default().with_seed(3)).unwrap().noiseless;
        let r = estimate_hybrid(&s, -5.0, &EstimatorParams::default()).unwrap();
        assert!(r.accepted_lengths.is_empty());
        assert_eq!(r.method_used, Method::Hybrid);
    }

    #[test]
    fn low_hint_takes_traversal_path() {
        let s = synthesize(&OfdmConfig::default().with_seed(3)).unwrap().noiseless;
        let r = estimate_hybrid(&s, -5.5, &EstimatorParams::default()).unwrap();
        assert!(!r.accepted_lengths.is_empty());
        assert_eq!(r.n_cn_hat, Some(128));
    }

    #[test]
    fn non_finite_hint_rejected() {
        let s = synthesize(&OfdmConfig::default()).unwrap().noiseless;
        assert!(estimate_hybrid(&s, f64::NAN, &EstimatorParams::default()).is_err());
    }
}
