//! Domain types shared by synthesis, the spectral kernels, the estimators and
//! the sweep harness.
//!
//! Lengths are always counted in samples at the receiver's sample rate, after
//! oversampling. The one exception is `n_os`, the symbol length after
//! decimating back to one sample per subcarrier spacing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How the transmitter interpolates baseband samples up to the receiver rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Zero insertion followed by a length-q boxcar, i.e. each baseband
    /// sample is held for q output samples.
    #[default]
    Hold,
    /// Zero insertion followed by a 64-tap Hamming-windowed sinc.
    WindowedSinc,
}

/// Where AWGN enters the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseStage {
    /// Noise is added at the baseband rate and oversampled together with the
    /// signal.
    #[default]
    Baseband,
    /// White noise is added at the receiver rate, after oversampling.
    Receiver,
}

/// Generation parameters and ground truth of one synthesized recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmConfig {
    pub carrier_count: usize,
    /// Cyclic prefix length as a fraction of the useful symbol length.
    pub cp_ratio: f64,
    pub oversampling_rate: usize,
    pub symbol_count: usize,
    #[serde(default)]
    pub carrier_freq_hz: f64,
    pub sample_rate_hz: f64,
    /// `None` generates a noiseless recording.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub noise_stage: NoiseStage,
}

impl Default for OfdmConfig {
    /// 16-QAM, 128 carriers, CP ratio 0.25, 20 symbols at 40 MHz, noiseless.
    fn default() -> Self {
        OfdmConfig {
            carrier_count: 128,
            cp_ratio: 0.25,
            oversampling_rate: 1,
            symbol_count: 20,
            carrier_freq_hz: 0.0,
            sample_rate_hz: 40e6,
            snr_db: None,
            seed: 0,
            interpolation: Interpolation::Hold,
            noise_stage: NoiseStage::Baseband,
        }
    }
}

impl OfdmConfig {
    pub fn with_snr(mut self, snr_db: Option<f64>) -> Self {
        self.snr_db = snr_db;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_oversampling(mut self, q: usize) -> Self {
        self.oversampling_rate = q;
        self
    }

    /// Checks every invariant and returns the derived lengths.
    pub fn validate(&self) -> Result<SymbolLengths> {
        if self.carrier_count < 2 {
            return Err(Error::InvalidConfig(format!(
                "carrier_count must be >= 2, got {}",
                self.carrier_count
            )));
        }
        if !(self.cp_ratio > 0.0 && self.cp_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cp_ratio must lie in (0, 1), got {}",
                self.cp_ratio
            )));
        }
        let guard = self.cp_ratio * self.carrier_count as f64;
        let guard_rounded = guard.round();
        if (guard - guard_rounded).abs() > 1e-9 || guard_rounded < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "cp_ratio * carrier_count = {guard} is not a positive integer"
            )));
        }
        if self.oversampling_rate == 0 {
            return Err(Error::InvalidConfig("oversampling_rate must be >= 1".into()));
        }
        if self.symbol_count == 0 {
            return Err(Error::InvalidConfig("symbol_count must be >= 1".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.carrier_freq_hz.is_finite()
            && self.carrier_freq_hz >= 0.0
            && self.carrier_freq_hz < self.sample_rate_hz / 2.0)
        {
            return Err(Error::InvalidConfig(format!(
                "carrier_freq_hz must lie in [0, sample_rate/2), got {}",
                self.carrier_freq_hz
            )));
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() {
                return Err(Error::InvalidConfig("snr_db is NaN".into()));
            }
        }
        let q = self.oversampling_rate;
        let n_u = q * self.carrier_count;
        let n_g = guard_rounded as usize * q;
        Ok(SymbolLengths {
            n_u,
            n_g,
            n_s: n_u + n_g,
            n_cn: self.carrier_count,
            q,
        })
    }

    /// Total number of samples a generated recording will contain.
    pub fn total_samples(&self) -> Result<usize> {
        Ok(self.validate()?.n_s * self.symbol_count)
    }
}

/// Derived OFDM lengths. `n_u`, `n_g` and `n_s` are receiver-rate samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolLengths {
    pub n_u: usize,
    pub n_g: usize,
    pub n_s: usize,
    pub n_cn: usize,
    pub q: usize,
}

impl SymbolLengths {
    /// Total symbol length after decimating by `q`.
    pub fn n_os(&self) -> usize {
        self.n_s / self.q
    }
}

/// Returns `(n_u, n_g, n_s)` for a config.
pub fn derive_lengths(cfg: &OfdmConfig) -> Result<(usize, usize, usize)> {
    let l = cfg.validate()?;
    Ok((l.n_u, l.n_g, l.n_s))
}

/// A finite, non-empty run of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    samples: Vec<Complex64>,
    sample_rate_hz: f64,
}

impl IqBuffer {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidBuffer("no samples".into()));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidBuffer(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::InvalidBuffer(format!("sample {i} is not finite")));
        }
        Ok(IqBuffer {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |r(i)|².
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        IqBuffer::new(self.samples.iter().map(|s| s * c).collect(), self.sample_rate_hz)
    }
}

/// What the index of a [`CorrelationProfile`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbscissaKind {
    Lag,
    Position,
    /// DFT bins; neighbours wrap around.
    FrequencyBin,
}

/// A real-valued curve over lag, position or frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    values: Vec<f64>,
    kind: AbscissaKind,
}

impl CorrelationProfile {
    pub fn new(values: Vec<f64>, kind: AbscissaKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidBuffer("empty profile".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBuffer("profile contains non-finite values".into()));
        }
        Ok(CorrelationProfile { values, kind })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> AbscissaKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Peak abscissas, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeakSet {
    abscissas: Vec<usize>,
}

impl PeakSet {
    pub fn new(abscissas: Vec<usize>) -> Result<Self> {
        if abscissas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBuffer(
                "peak abscissas must be strictly increasing".into(),
            ));
        }
        Ok(PeakSet { abscissas })
    }

    pub fn abscissas(&self) -> &[usize] {
        &self.abscissas
    }

    pub fn count(&self) -> usize {
        self.abscissas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissas.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.abscissas.last().copied()
    }
}

/// Best arithmetic progression found among a peak set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProgressionResult {
    /// Peaks on the best progression.
    pub n_use: usize,
    /// All detected peaks.
    pub n_all: usize,
    /// Common difference in bins, 0 when no progression exists.
    pub spacing: usize,
}

impl ProgressionResult {
    pub fn fraction(&self) -> f64 {
        if self.n_all == 0 {
            0.0
        } else {
            self.n_use as f64 / self.n_all as f64
        }
    }
}

/// Estimation procedure that produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Autocorr,
    Sliding,
    Traversal,
    Substitution,
    Hybrid,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Autocorr,
        Method::Sliding,
        Method::Traversal,
        Method::Substitution,
        Method::Hybrid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Autocorr => "autocorr",
            Method::Sliding => "sliding",
            Method::Traversal => "traversal",
            Method::Substitution => "substitution",
            Method::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Estimated lengths. Absent fields were not produced by the method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub n_s_hat: Option<usize>,
    pub n_u_hat: Option<usize>,
    pub q_hat: Option<usize>,
    pub n_cn_hat: Option<usize>,
    pub n_os_hat: Option<usize>,
    pub method_used: Method,
    /// Accepted candidate symbol lengths from the traversal, when it ran.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accepted_lengths: Vec<usize>,
}

impl EstimationReport {
    pub fn empty(method_used: Method) -> Self {
        EstimationReport {
            n_s_hat: None,
            n_u_hat: None,
            q_hat: None,
            n_cn_hat: None,
            n_os_hat: None,
            method_used,
            accepted_lengths: Vec::new(),
        }
    }
}

/// Search range and acceptance rule of the symbol-length traversal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraversalParams {
    /// First candidate symbol length.
    pub n_min: usize,
    /// Candidates stop before this length.
    pub n_max: usize,
    /// Symbols per segment; the expected harmonic spacing in bins.
    pub n_o: usize,
    /// Required share of peaks that sit on the progression.
    pub majority_threshold: f64,
    /// Minimum total peak count for a candidate to qualify.
    pub min_peak_count: usize,
    /// Compare the peak count against `n_min` instead of `min_peak_count`.
    pub literal_count_predicate: bool,
    /// Length of a contiguous qualifying run that ends the search.
    pub min_run: usize,
    /// Progression membership tolerance in bins.
    pub membership_tolerance: usize,
    pub lag: SegmentLag,
    pub stride: SegmentStride,
}

impl Default for TraversalParams {
    fn default() -> Self {
        TraversalParams {
            n_min: 120,
            n_max: 200,
            n_o: 6,
            majority_threshold: 0.5,
            min_peak_count: 4,
            literal_count_predicate: false,
            min_run: 3,
            membership_tolerance: 1,
            lag: SegmentLag::EstimatedUseful,
            stride: SegmentStride::Block,
        }
    }
}

impl TraversalParams {
    pub fn with_range(mut self, n_min: usize, n_max: usize) -> Self {
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    /// A range of ±25% around an expected symbol length.
    pub fn around(expected: usize) -> Self {
        let n_min = (expected * 3 / 4).max(2);
        let n_max = (expected * 5).div_ceil(4).max(n_min + 2);
        TraversalParams::default().with_range(n_min, n_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min >= self.n_max {
            return Err(Error::InvalidConfig(format!(
                "traversal range must satisfy 0 < n_min < n_max, got {}..{}",
                self.n_min, self.n_max
            )));
        }
        if self.n_o < 2 {
            return Err(Error::InvalidConfig("n_o must be >= 2".into()));
        }
        if !(self.majority_threshold > 0.0 && self.majority_threshold <= 1.0) {
            return Err(Error::InvalidConfig(
                "majority_threshold must lie in (0, 1]".into(),
            ));
        }
        if self.min_run == 0 {
            return Err(Error::InvalidConfig("min_run must be >= 1".into()));
        }
        Ok(())
    }
}

/// Lag of the conjugate product accumulated by the segment average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLag {
    /// r(i)·r*(i): averaged instantaneous power.
    Zero,
    /// r(i)·r*(i+lag) with a fixed lag.
    Fixed(usize),
    /// Lag set to the useful-length estimate from the lag-correlation argmax.
    EstimatedUseful,
}

/// Offset between consecutive averaged segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentStride {
    /// Segments start one candidate symbol apart and overlap.
    Symbol,
    /// Segments are back to back, `n_o` candidate symbols apart.
    Block,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_cn: usize, cp: f64, q: usize) -> OfdmConfig {
        OfdmConfig {
            carrier_count: n_cn,
            cp_ratio: cp,
            oversampling_rate: q,
            ..OfdmConfig::default()
        }
    }

    #[test]
    fn lengths_for_reference_config() {
        assert_eq!(derive_lengths(&cfg(128, 0.25, 1)).unwrap(), (128, 32, 160));
    }

    #[test]
    fn lengths_smallest_config() {
        assert_eq!(derive_lengths(&cfg(2, 0.5, 1)).unwrap(), (2, 1, 3));
    }

    #[test]
    fn lengths_scale_with_oversampling() {
        assert_eq!(derive_lengths(&cfg(128, 0.25, 4)).unwrap(), (512, 128, 640));
        assert_eq!(cfg(128, 0.25, 4).validate().unwrap().n_os(), 160);
    }

    #[test]
    fn non_integral_guard_is_rejected() {
        let err = derive_lengths(&cfg(128, 0.3, 1)).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn other_invalid_configs() {
        assert!(cfg(1, 0.5, 1).validate().is_err());
        assert!(cfg(128, 0.0, 1).validate().is_err());
        assert!(cfg(128, 1.0, 1).validate().is_err());
        assert!(cfg(128, 0.25, 0).validate().is_err());
        let mut c = cfg(128, 0.25, 1);
        c.carrier_freq_hz = 20e6;
        assert!(c.validate().is_err());
        c.carrier_freq_hz = 10e6;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn buffer_rejects_bad_samples() {
        assert!(IqBuffer::new(vec![], 1.0).is_err());
        assert!(IqBuffer::new(vec![Complex64::new(f64::NAN, 0.0)], 1.0).is_err());
        assert!(IqBuffer::new(vec![Complex64::new(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn peak_set_must_increase() {
        assert!(PeakSet::new(vec![1, 1]).is_err());
        assert!(PeakSet::new(vec![3, 1]).is_err());
        assert_eq!(PeakSet::new(vec![1, 4]).unwrap().count(), 2);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let json = r#"{"carrier_count":128,"cp_ratio":0.25,"oversampling_rate":1,
            "symbol_count":20,"sample_rate_hz":4e7,"snr":3}"#;
        assert!(serde_json::from_str::<OfdmConfig>(json).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn derived_lengths_are_consistent(n_cn in 2usize..512, g in 1usize..512, q in 1usize..8) {
            proptest::prop_assume!(g < n_cn);
            let c = cfg(n_cn, g as f64 / n_cn as f64, q);
            let l = c.validate().unwrap();
            proptest::prop_assert_eq!(l.n_s, l.n_u + l.n_g);
            proptest::prop_assert_eq!(l.n_u % n_cn, 0);
            proptest::prop_assert_eq!(l.n_g, g * q);
        }
    }
}
