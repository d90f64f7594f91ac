use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AbscissaKind, CorrelationProfile, PeakSet};

/// What counts as a peak.
///
/// A peak is a local maximum (a plateau counts once, at its midpoint) whose
/// value reaches `min_prominence_ratio` of the profile maximum. Peaks closer
/// than `min_separation` keep only the larger one. Frequency-bin profiles wrap
/// around; other profiles never report their end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakDetectParams {
    pub min_prominence_ratio: f64,
    pub min_separation: usize,
    /// Drop bin 0 and leave it out of the maximum.
    pub exclude_dc: bool,
}

impl PeakDetectParams {
    pub fn new(min_prominence_ratio: f64, min_separation: usize, exclude_dc: bool) -> Result<Self> {
        let p = PeakDetectParams {
            min_prominence_ratio,
            min_separation,
            exclude_dc,
        };
        p.validate()?;
        Ok(p)
    }

    /// Defaults for segment-average spectra: DC excluded.
    pub fn segment_spectrum() -> Self {
        PeakDetectParams {
            min_prominence_ratio: 0.3,
            min_separation: 2,
            exclude_dc: true,
        }
    }

    /// Defaults for the lag-1 PSD. DC dominates that spectrum, so it is left
    /// out of the threshold as well.
    pub fn lag_psd() -> Self {
        PeakDetectParams {
            min_prominence_ratio: 0.5,
            min_separation: 2,
            exclude_dc: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_prominence_ratio > 0.0 && self.min_prominence_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min_prominence_ratio must lie in (0, 1), got {}",
                self.min_prominence_ratio
            )));
        }
        Ok(())
    }
}

impl Default for PeakDetectParams {
    fn default() -> Self {
        PeakDetectParams::segment_spectrum()
    }
}

/// Local maxima of `v`, plateaus reported at their midpoint. Neighbours wrap
/// when `circular`.
fn local_maxima(v: &[f64], circular: bool) -> Vec<usize> {
    let n = v.len();
    if n < 2 {
        return Vec::new();
    }
    // walk runs of equal values; start linear scans from a global minimum so a
    // run never straddles the wrap point
    let origin = if circular {
        (0..n)
            .min_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap().then(a.cmp(&b)))
            .unwrap()
    } else {
        0
    };
    let at = |j: usize| v[(origin + j) % n];
    let mut out = Vec::new();
    let mut j = 0;
    while j < n {
        let mut end = j;
        while end + 1 < n && at(end + 1) == at(j) {
            end += 1;
        }
        // circular: the run ending at n-1 borders the origin
        let left = if j == 0 {
            if circular {
                Some(at(n - 1))
            } else {
                None
            }
        } else {
            Some(at(j - 1))
        };
        let right = if end + 1 == n {
            if circular {
                Some(at(0))
            } else {
                None
            }
        } else {
            Some(at(end + 1))
        };
        if let (Some(l), Some(r)) = (left, right) {
            if l < at(j) && r < at(j) {
                out.push((origin + (j + end) / 2) % n);
            }
        }
        j = end + 1;
    }
    out.sort_unstable();
    out
}

/// Detects peaks of a profile. The result may be empty.
pub fn detect_peaks(profile: &CorrelationProfile, params: &PeakDetectParams) -> PeakSet {
    let v = profile.values();
    let circular = profile.kind() == AbscissaKind::FrequencyBin;
    let skip_dc = params.exclude_dc;
    let max = v
        .iter()
        .enumerate()
        .filter(|(i, _)| !(skip_dc && *i == 0))
        .map(|(_, x)| *x)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || max <= 0.0 {
        return PeakSet::default();
    }
    let floor = params.min_prominence_ratio * max;
    let mut candidates: Vec<usize> = local_maxima(v, circular)
        .into_iter()
        .filter(|&i| !(skip_dc && i == 0) && v[i] >= floor)
        .collect();
    // strongest first, ties to the smaller abscissa
    candidates.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then(a.cmp(&b)));
    let n = v.len();
    let reach = params.min_separation.saturating_sub(1);
    let mut taken = vec![false; n];
    let mut kept: Vec<usize> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let blocked = (1..=reach).any(|d| {
            let (left, right) = if circular {
                (Some((c + n - d % n) % n), Some((c + d) % n))
            } else {
                (c.checked_sub(d), Some(c + d).filter(|&r| r < n))
            };
            left.is_some_and(|l| taken[l]) || right.is_some_and(|r| taken[r])
        });
        if !blocked {
            taken[c] = true;
            kept.push(c);
        }
    }
    kept.sort_unstable();
    PeakSet::new(kept).expect("sorted unique abscissas")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(v: Vec<f64>, kind: AbscissaKind) -> CorrelationProfile {
        CorrelationProfile::new(v, kind).unwrap()
    }

    #[test]
    fn monotone_profile_has_no_peaks() {
        let p = profile((0..50).map(|i| i as f64).collect(), AbscissaKind::Position);
        assert!(detect_peaks(&p, &PeakDetectParams::segment_spectrum()).is_empty());
    }

    #[test]
    fn equal_spikes_without_dc() {
        let mut v = vec![0.0; 60];
        for k in (0..60).step_by(6) {
            v[k] = 5.0;
        }
        let p = profile(v, AbscissaKind::FrequencyBin);
        let params = PeakDetectParams::new(0.3, 2, true).unwrap();
        let got = detect_peaks(&p, &params);
        assert_eq!(got.abscissas(), &[6, 12, 18, 24, 30, 36, 42, 48, 54]);
    }

    #[test]
    fn dc_kept_and_wraps_when_requested() {
        let mut v = vec![0.1; 16];
        v[0] = 4.0;
        v[8] = 2.0;
        let p = profile(v, AbscissaKind::FrequencyBin);
        let keep_dc = PeakDetectParams::new(0.3, 2, false).unwrap();
        assert_eq!(detect_peaks(&p, &keep_dc).abscissas(), &[0, 8]);
        assert_eq!(detect_peaks(&p, &PeakDetectParams::lag_psd()).abscissas(), &[8]);
    }

    #[test]
    fn threshold_and_separation() {
        let v = vec![0.0, 1.0, 0.0, 0.9, 0.0, 0.2, 0.0, 0.0, 0.5, 0.0];
        let p = profile(v, AbscissaKind::Position);
        let loose = PeakDetectParams::new(0.3, 1, false).unwrap();
        assert_eq!(detect_peaks(&p, &loose).abscissas(), &[1, 3, 8]);
        let sep = PeakDetectParams::new(0.3, 3, false).unwrap();
        assert_eq!(detect_peaks(&p, &sep).abscissas(), &[1, 8]);
    }

    #[test]
    fn plateau_reports_midpoint() {
        let v = vec![0.0, 1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        let p = profile(v, AbscissaKind::Position);
        let params = PeakDetectParams::new(0.5, 1, false).unwrap();
        assert_eq!(detect_peaks(&p, &params).abscissas(), &[4]);
    }

    #[test]
    fn flat_profile_has_no_peaks() {
        let p = profile(vec![3.0; 10], AbscissaKind::FrequencyBin);
        assert!(detect_peaks(&p, &PeakDetectParams::lag_psd()).is_empty());
    }

    #[test]
    fn circular_plateau_across_wrap() {
        let mut v = vec![0.0; 12];
        v[11] = 1.0;
        v[0] = 1.0;
        v[1] = 1.0;
        let p = profile(v, AbscissaKind::FrequencyBin);
        let keep_dc = PeakDetectParams::new(0.3, 2, false).unwrap();
        assert_eq!(detect_peaks(&p, &keep_dc).abscissas(), &[0]);
    }

    proptest::proptest! {
        #[test]
        fn kept_peaks_are_separated(
            v in proptest::collection::vec(0.0f64..10.0, 3..200),
            sep in 1usize..12,
            circular in proptest::bool::ANY,
        ) {
            let n = v.len();
            let kind = if circular { AbscissaKind::FrequencyBin } else { AbscissaKind::Position };
            let p = profile(v, kind);
            let params = PeakDetectParams::new(0.3, sep, false).unwrap();
            let got = detect_peaks(&p, &params);
            let k = got.abscissas();
            for a in 0..k.len() {
                for b in a + 1..k.len() {
                    let d = k[b] - k[a];
                    let d = if circular { d.min(n - d) } else { d };
                    proptest::prop_assert!(d >= sep, "{:?}", k);
                }
            }
        }
    }

    #[test]
    fn ratio_is_validated() {
        assert!(PeakDetectParams::new(0.0, 1, false).is_err());
        assert!(PeakDetectParams::new(1.0, 1, false).is_err());
    }
}
