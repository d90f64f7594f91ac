use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::peaks::{detect_peaks, PeakDetectParams};
use crate::spectral::lag_psd;
use crate::types::IqBuffer;

/// Settings of the oversampling-rate estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OversamplingParams {
    pub peaks: PeakDetectParams,
    /// Larger estimates are treated as a peak carpet and reported as 1.
    pub q_max: usize,
    /// Bins a peak may sit away from the nearest lattice point.
    pub lattice_tolerance: usize,
}

impl Default for OversamplingParams {
    fn default() -> Self {
        OversamplingParams {
            peaks: PeakDetectParams::lag_psd(),
            q_max: 16,
            lattice_tolerance: 2,
        }
    }
}

/// Oversampling rate and the spectral peaks behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct OversamplingEstimate {
    pub q: usize,
    /// Median circular spacing of the lag-1 spectrum peaks, in bins.
    pub spacing: f64,
    pub peaks: Vec<usize>,
}

fn circular_spacings(peaks: &[usize], n: usize) -> Vec<f64> {
    let mut gaps: Vec<f64> = peaks.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    gaps.push((peaks[0] + n - peaks[peaks.len() - 1]) as f64);
    gaps
}

/// Oversampling rate from the peak spacing of the lag-1 product spectrum.
///
/// An oversampled recording shows lines at multiples of `L_M / q`; the rate is
/// the buffer length over their median spacing, DC included. DC alone means
/// no oversampling. Estimates above `q_max`, or peaks that do not sit on the
/// implied lattice, come from a noise carpet and are also reported as 1.
pub fn estimate_oversampling(signal: &IqBuffer, params: &OversamplingParams) -> Result<OversamplingEstimate> {
    params.peaks.validate()?;
    let n = signal.len();
    let psd = lag_psd(signal, 1)?;
    let peaks = detect_peaks(&psd, &params.peaks);
    let mut k = peaks.abscissas().to_vec();
    if psd.values()[0] <= 0.0 && k.is_empty() {
        return Err(Error::failed("oversampling", "lag-1 spectrum has no peak"));
    }
    // DC always sits on the lattice
    if k.first() != Some(&0) {
        k.insert(0, 0);
    }
    if k.len() == 1 {
        return Ok(OversamplingEstimate {
            q: 1,
            spacing: n as f64,
            peaks: k,
        });
    }
    let mut gaps = circular_spacings(&k, n);
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = gaps.len();
    let spacing = if m % 2 == 1 {
        gaps[m / 2]
    } else {
        (gaps[m / 2 - 1] + gaps[m / 2]) / 2.0
    };
    let q = (n as f64 / spacing).round() as usize;
    let period = n as f64 / q.max(1) as f64;
    let on_lattice = k
        .iter()
        .filter(|&&p| {
            let r = p as f64 % period;
            r.min(period - r) <= params.lattice_tolerance as f64
        })
        .count();
    let consistent = 2 * on_lattice >= k.len() && k.len() <= 2 * q;
    let q = if q == 0 || q > params.q_max || !consistent {
        1
    } else {
        q
    };
    Ok(OversamplingEstimate { q, spacing, peaks: k })
}
