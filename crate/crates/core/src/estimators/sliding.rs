use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::peaks::{detect_peaks, PeakDetectParams};
use crate::spectral::sliding_cp_profile;
use crate::types::{CorrelationProfile, IqBuffer};

/// Settings of the sliding CP correlation estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlidingParams {
    /// Correlation window in samples.
    pub window: usize,
    /// Peaks below this share of the profile maximum are ignored.
    pub peak_ratio: f64,
    /// Each peak is located at the centre of the region above this share of
    /// its own height.
    pub midpoint_level: f64,
}

impl SlidingParams {
    /// Window of one cyclic prefix, at most a quarter of the useful length
    /// and at least 4 samples.
    pub fn for_lengths(n_u: usize, n_g: usize) -> Self {
        SlidingParams {
            window: n_g.min(n_u / 4).max(4),
            ..SlidingParams::default()
        }
    }
}

impl Default for SlidingParams {
    fn default() -> Self {
        SlidingParams {
            window: 32,
            peak_ratio: 0.5,
            midpoint_level: 0.99,
        }
    }
}

/// Centre of the region around `peak` that stays above `level` times its
/// height, or `None` when that region runs into either end of the profile.
fn plateau_centre(v: &[f64], peak: usize, level: f64) -> Option<f64> {
    let h = level * v[peak];
    let mut a = peak;
    let mut b = peak;
    while a > 0 && v[a - 1] >= h {
        a -= 1;
    }
    while b + 1 < v.len() && v[b + 1] >= h {
        b += 1;
    }
    (a > 0 && b + 1 < v.len()).then(|| (a + b) as f64 / 2.0)
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Least-squares slope of `y` against `x`; `None` when `x` is constant.
fn fit_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Symbol length from a sliding CP profile.
///
/// Peaks whose region above `midpoint_level` reaches either end of the
/// profile are dropped. The remaining centres are assigned to symbol indices
/// using their median spacing,
/// then a line is fitted through (index, centre). Centres that sit far off
/// the first fit are dropped before refitting. The rounded slope is the
/// symbol length.
pub fn ns_from_profile(profile: &CorrelationProfile, n_u: usize, params: &SlidingParams) -> Result<usize> {
    let detect = PeakDetectParams::new(params.peak_ratio, n_u.max(1), false)?;
    let peaks = detect_peaks(profile, &detect);
    if peaks.count() < 2 {
        return Err(Error::failed(
            "sliding",
            format!("need two correlation peaks, found {}", peaks.count()),
        ));
    }
    let v = profile.values();
    // peaks cut off by the ends of the profile have biased centres
    let mids: Vec<f64> = peaks
        .abscissas()
        .iter()
        .filter_map(|&p| plateau_centre(v, p, params.midpoint_level))
        .collect();
    if mids.len() < 2 {
        return Err(Error::failed(
            "sliding",
            format!("need two complete correlation peaks, found {}", mids.len()),
        ));
    }
    let mut gaps: Vec<f64> = mids.windows(2).map(|w| w[1] - w[0]).collect();
    let coarse = median(&mut gaps);
    if coarse <= 0.0 {
        return Err(Error::failed("sliding", "coincident peak centres"));
    }
    let idx: Vec<f64> = mids.iter().map(|m| ((m - mids[0]) / coarse).round()).collect();
    let (mut slope, icpt) = fit_slope(&idx, &mids).unwrap_or((coarse, mids[0]));
    let mut res: Vec<f64> = idx
        .iter()
        .zip(&mids)
        .map(|(j, m)| (m - (slope * j + icpt)).abs())
        .collect();
    let cut = (3.0 * median(&mut res.clone())).max(1.0);
    let (kx, ky): (Vec<f64>, Vec<f64>) = idx
        .iter()
        .zip(&mids)
        .zip(res.drain(..))
        .filter(|(_, r)| *r <= cut)
        .map(|((j, m), _)| (*j, *m))
        .unzip();
    if kx.len() >= 2 {
        if let Some((s, _)) = fit_slope(&kx, &ky) {
            slope = s;
        }
    }
    let n_s = (slope + 0.5).floor();
    if n_s < 1.0 {
        return Err(Error::failed("sliding", "non-positive symbol spacing"));
    }
    Ok(n_s as usize)
}

/// Symbol length from the sliding CP correlation at a known useful length.
pub fn estimate_ns_sliding(signal: &IqBuffer, n_u: usize, params: &SlidingParams) -> Result<usize> {
    if params.window == 0 {
        return Err(Error::InvalidConfig("sliding window must be >= 1".into()));
    }
    let profile = sliding_cp_profile(signal, n_u, params.window)?;
    ns_from_profile(&profile, n_u, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize;
    use crate::types::{AbscissaKind, OfdmConfig};

    fn bumps(centres: &[usize], len: usize, half_width: usize) -> CorrelationProfile {
        let mut v = vec![0.05_f64; len];
        for &c in centres {
            for (i, x) in v.iter_mut().enumerate() {
                let d = i.abs_diff(c);
                if d <= half_width {
                    *x = x.max(1.0 - d as f64 / (half_width + 1) as f64);
                }
            }
        }
        CorrelationProfile::new(v, AbscissaKind::Position).unwrap()
    }

    #[test]
    fn two_peaks_give_their_distance() {
        let p = bumps(&[100, 260], 400, 10);
        assert_eq!(ns_from_profile(&p, 128, &SlidingParams::default()).unwrap(), 160);
    }

    #[test]
    fn missing_peak_does_not_halve_the_estimate() {
        let p = bumps(&[20, 180, 500, 660, 820], 900, 8);
        assert_eq!(ns_from_profile(&p, 128, &SlidingParams::default()).unwrap(), 160);
    }

    #[test]
    fn single_peak_fails() {
        let p = bumps(&[100], 400, 10);
        let e = ns_from_profile(&p, 128, &SlidingParams::default()).unwrap_err();
        assert!(e.is_estimation_failure());
    }

    #[test]
    fn noiseless_reference_signal() {
        for seed in 0..5 {
            let s = synthesize(&OfdmConfig::default().with_seed(seed))
                .unwrap()
                .noiseless;
            assert_eq!(
                estimate_ns_sliding(&s, 128, &SlidingParams::default()).unwrap(),
                160
            );
        }
    }

    #[test]
    fn oversampled_signal() {
        let s = synthesize(&OfdmConfig::default().with_oversampling(2).with_seed(4))
            .unwrap()
            .noiseless;
        let p = SlidingParams::for_lengths(256, 64);
        assert_eq!(estimate_ns_sliding(&s, 256, &p).unwrap(), 320);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
