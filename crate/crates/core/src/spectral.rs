//! Numerical kernels shared by the estimators: DFTs, normalized lag
//! correlation, the sliding CP correlation profile, segment averaging and its
//! spectrum, and the lag-τ power spectral density.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::types::{AbscissaKind, CorrelationProfile, IqBuffer, SegmentStride};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&(len, inverse)) {
        return Arc::clone(p);
    }
    let direction = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let p = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .unwrap()
        .plan_fft(len, direction);
    cache.lock().unwrap().insert((len, inverse), Arc::clone(&p));
    p
}

/// Unnormalized forward DFT, X[n] = Σ x[i] e^{-j2πni/N}. Any length.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    if !buf.is_empty() {
        plan(buf.len(), false).process(&mut buf);
    }
    buf
}

/// Unnormalized inverse DFT, x[i] = Σ X[n] e^{+j2πni/N}.
pub fn inverse_dft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    if !buf.is_empty() {
        plan(buf.len(), true).process(&mut buf);
    }
    buf
}

/// Inverse DFT scaled by 1/√N, so unit-power input gives unit-power output.
pub fn inverse_dft_unitary(input: &[Complex64]) -> Vec<Complex64> {
    let scale = 1.0 / (input.len() as f64).sqrt();
    let mut out = inverse_dft(input);
    out.iter_mut().for_each(|x| *x *= scale);
    out
}

fn power_prefix(samples: &[Complex64]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(samples.len() + 1);
    acc.push(0.0);
    let mut sum = 0.0;
    for s in samples {
        sum += s.norm_sqr();
        acc.push(sum);
    }
    acc
}

/// Normalized magnitude of the lag-`k` correlation over the first
/// `L_M - window` samples:
///
/// `|Σ r(i) r*(i+k)| / (½ Σ (|r(i)|² + |r(i+k)|²))`, a value in `[0, 1]`.
///
/// `window` reserves the tail of the buffer so every lag up to `window` sees
/// the same number of products.
pub fn normalized_autocorr_objective(signal: &IqBuffer, k: usize, window: usize) -> Result<f64> {
    let r = signal.samples();
    if window >= r.len() {
        return Err(Error::BufferTooShort {
            needed: window + 1,
            available: r.len(),
        });
    }
    if k > window {
        return Err(Error::LagOutOfRange {
            lag: k,
            min: 0,
            max: window,
        });
    }
    let n = r.len() - window;
    let num: Complex64 = (0..n).map(|i| r[i] * r[i + k].conj()).sum();
    let den: f64 = (0..n).map(|i| r[i].norm_sqr() + r[i + k].norm_sqr()).sum::<f64>() / 2.0;
    Ok(if den > 0.0 { num.norm() / den } else { 0.0 })
}

/// The same objective as [`normalized_autocorr_objective`] for every lag in
/// `0..=max_lag`, computed with one FFT cross-correlation.
pub fn autocorr_objective_profile(
    signal: &IqBuffer,
    max_lag: usize,
    window: usize,
) -> Result<CorrelationProfile> {
    let r = signal.samples();
    if window >= r.len() {
        return Err(Error::BufferTooShort {
            needed: window + 1,
            available: r.len(),
        });
    }
    if max_lag > window {
        return Err(Error::LagOutOfRange {
            lag: max_lag,
            min: 0,
            max: window,
        });
    }
    let n = r.len() - window;
    // c(k) = Σ_{i<n} r(i) r*(i+k): correlate the head against the whole buffer
    let size = (r.len() + n).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    a[..n].copy_from_slice(&r[..n]);
    b[..r.len()].copy_from_slice(r);
    let fa = dft(&a);
    let fb = dft(&b);
    // Σ_i a(i) b*(i+k) = IDFT(A* · B)* evaluated at k, scaled by 1/size
    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    let corr = inverse_dft(&prod);
    let p = power_prefix(r);
    let values = (0..=max_lag)
        .map(|k| {
            let num = corr[k].norm() / size as f64;
            let den = (p[n] + p[n + k] - p[k]) / 2.0;
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        })
        .collect();
    CorrelationProfile::new(values, AbscissaKind::Lag)
}

/// Sliding-window CP correlation at a fixed lag `n_u`.
///
/// Entry `k` correlates the `window` samples starting at `k` with those
/// starting at `k + n_u`, normalized by half their joint energy, for
/// `k = 0..=L_M - n_u - window`. Windows that sit inside a cyclic prefix
/// approach 1.
pub fn sliding_cp_profile(signal: &IqBuffer, n_u: usize, window: usize) -> Result<CorrelationProfile> {
    let r = signal.samples();
    if n_u == 0 || window == 0 {
        return Err(Error::InvalidConfig(
            "sliding profile needs n_u >= 1 and window >= 1".into(),
        ));
    }
    let needed = n_u + window + 1;
    if r.len() < needed {
        return Err(Error::BufferTooShort {
            needed,
            available: r.len(),
        });
    }
    let m = r.len() - n_u;
    let mut prod = Vec::with_capacity(m + 1);
    let mut energy = Vec::with_capacity(m + 1);
    prod.push(Complex64::new(0.0, 0.0));
    energy.push(0.0);
    for i in 0..m {
        let a = r[i];
        let b = r[i + n_u];
        prod.push(prod[i] + a * b.conj());
        energy.push(energy[i] + a.norm_sqr() + b.norm_sqr());
    }
    let count = m - window + 1;
    let values = (0..count)
        .map(|k| {
            let num = (prod[k + window] - prod[k]).norm();
            let den = (energy[k + window] - energy[k]) / 2.0;
            if den > 0.0 {
                (num / den).min(1.0)
            } else {
                0.0
            }
        })
        .collect();
    CorrelationProfile::new(values, AbscissaKind::Position)
}

/// Average of `n_ch` segments of the lag product r(i)·r*(i+lag), each
/// `n_o·n_p` samples long.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentAverage {
    values: Vec<Complex64>,
    n_p: usize,
    n_o: usize,
    n_ch: usize,
}

impl SegmentAverage {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_o(&self) -> usize {
        self.n_o
    }

    pub fn n_ch(&self) -> usize {
        self.n_ch
    }
}

fn stride_len(stride: SegmentStride, n_p: usize, n_o: usize) -> usize {
    match stride {
        SegmentStride::Symbol => n_p,
        SegmentStride::Block => n_o * n_p,
    }
}

/// Samples needed for `n_ch` segments.
pub fn segment_samples_needed(
    n_p: usize,
    n_o: usize,
    n_ch: usize,
    lag: usize,
    stride: SegmentStride,
) -> usize {
    (n_ch.max(1) - 1) * stride_len(stride, n_p, n_o) + n_o * n_p + lag
}

/// Largest segment count a buffer of `len` samples supports, 0 if none.
pub fn max_segments(len: usize, n_p: usize, n_o: usize, lag: usize, stride: SegmentStride) -> usize {
    let first = n_o * n_p + lag;
    if n_p == 0 || len < first {
        return 0;
    }
    (len - first) / stride_len(stride, n_p, n_o) + 1
}

/// Averages `n_ch` segments of r(i)·r*(i+lag), each `n_o·n_p` long.
///
/// With `SegmentStride::Symbol` segment `m` starts at `m·n_p`; with
/// `SegmentStride::Block` it starts at `m·n_o·n_p`.
pub fn segment_average(
    signal: &IqBuffer,
    n_p: usize,
    n_o: usize,
    n_ch: usize,
    lag: usize,
    stride: SegmentStride,
) -> Result<SegmentAverage> {
    if n_p == 0 || n_o == 0 || n_ch == 0 {
        return Err(Error::InvalidConfig(
            "segment average needs n_p, n_o and n_ch >= 1".into(),
        ));
    }
    let r = signal.samples();
    let needed = segment_samples_needed(n_p, n_o, n_ch, lag, stride);
    if r.len() < needed {
        return Err(Error::BufferTooShort {
            needed,
            available: r.len(),
        });
    }
    let len = n_o * n_p;
    let step = stride_len(stride, n_p, n_o);
    let mut values = vec![Complex64::new(0.0, 0.0); len];
    for m in 0..n_ch {
        let start = m * step;
        for (i, v) in values.iter_mut().enumerate() {
            *v += r[start + i] * r[start + i + lag].conj();
        }
    }
    let scale = 1.0 / n_ch as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(SegmentAverage {
        values,
        n_p,
        n_o,
        n_ch,
    })
}

/// Magnitude of the full-length DFT of a segment average.
pub fn spectrum_magnitude(avg: &SegmentAverage) -> Result<CorrelationProfile> {
    magnitude_spectrum(avg.values())
}

/// |DFT| of an arbitrary complex sequence as a frequency-bin profile.
pub fn magnitude_spectrum(values: &[Complex64]) -> Result<CorrelationProfile> {
    if values.is_empty() {
        return Err(Error::InvalidBuffer("empty sequence".into()));
    }
    CorrelationProfile::new(
        dft(values).iter().map(|x| x.norm()).collect(),
        AbscissaKind::FrequencyBin,
    )
}

/// Spectrum of the lag-τ product:
/// `|Σ_{i=0}^{L_M-τ-1} r(i) r*(i+τ) e^{-j2πωi/L_M}|` for `ω = 0..L_M`.
pub fn lag_psd(signal: &IqBuffer, tau: usize) -> Result<CorrelationProfile> {
    let r = signal.samples();
    if r.len() < tau + 2 {
        return Err(Error::BufferTooShort {
            needed: tau + 2,
            available: r.len(),
        });
    }
    let mut prod = vec![Complex64::new(0.0, 0.0); r.len()];
    for i in 0..r.len() - tau {
        prod[i] = r[i] * r[i + tau].conj();
    }
    magnitude_spectrum(&prod)
}
