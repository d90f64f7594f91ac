//! OFDM signal synthesis over an AWGN channel.
//!
//! Each symbol carries `carrier_count` Gray-mapped 16-QAM values. The inverse
//! DFT of a symbol is interpolated up to the receiver rate, its tail is copied
//! in front as the cyclic prefix, an optional carrier shift is applied, and
//! AWGN is added at the configured SNR.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::inverse_dft_unitary;
use crate::types::{Interpolation, IqBuffer, NoiseStage, OfdmConfig, SymbolLengths};

/// Taps of the windowed-sinc interpolation filter.
pub const SINC_TAPS: usize = 64;

const QAM16_LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

/// Gray-maps two bits onto one 16-QAM amplitude level.
fn gray_level(bits: u8) -> f64 {
    // 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    match bits & 0b11 {
        0b00 => QAM16_LEVELS[0],
        0b01 => QAM16_LEVELS[1],
        0b11 => QAM16_LEVELS[2],
        _ => QAM16_LEVELS[3],
    }
}

/// Maps a 4-bit word onto the unit-average-power 16-QAM constellation.
pub fn qam16_map(word: u8) -> Complex64 {
    let scale = 1.0 / 10f64.sqrt();
    Complex64::new(gray_level(word >> 2), gray_level(word)) * scale
}

/// The full 16-point constellation in word order.
pub fn qam16_constellation() -> [Complex64; 16] {
    std::array::from_fn(|w| qam16_map(w as u8))
}

/// A stream of 16-QAM symbols with unit average power.
#[derive(Debug, Clone, PartialEq)]
pub struct QamSymbolStream {
    symbols: Vec<Complex64>,
}

impl QamSymbolStream {
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        QamSymbolStream {
            symbols: (0..len).map(|_| qam16_map(rng.gen::<u8>() & 0x0f)).collect(),
        }
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }
}

/// Mixes a seed with stream indices into an independent 64-bit seed.
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    stream.iter().fold(mix(master), |acc, &s| mix(acc ^ mix(s)))
}

/// Periodic Hamming-windowed sinc centred on tap `SINC_TAPS / 2`, so the
/// interpolator has an integer group delay and passes input samples through.
fn sinc_kernel(q: usize) -> Vec<f64> {
    let centre = (SINC_TAPS / 2) as f64;
    (0..SINC_TAPS)
        .map(|n| {
            let x = n as f64 - centre;
            let t = x / q as f64;
            let sinc = if t == 0.0 { 1.0 } else { (PI * t).sin() / (PI * t) };
            let hamming = 0.54 + 0.46 * (2.0 * PI * x / SINC_TAPS as f64).cos();
            sinc * hamming
        })
        .collect()
}

/// Output power gain of the interpolator for white input.
fn white_gain(kind: Interpolation, q: usize) -> f64 {
    match kind {
        Interpolation::Hold => 1.0,
        Interpolation::WindowedSinc => {
            if q == 1 {
                1.0
            } else {
                sinc_kernel(q).iter().map(|h| h * h).sum::<f64>() / q as f64
            }
        }
    }
}

fn interpolate(samples: &[Complex64], q: usize, kind: Interpolation, circular: bool) -> Vec<Complex64> {
    if q == 1 {
        return samples.to_vec();
    }
    match kind {
        Interpolation::Hold => samples.iter().flat_map(|&s| std::iter::repeat_n(s, q)).collect(),
        Interpolation::WindowedSinc => {
            let h = sinc_kernel(q);
            let len = samples.len() as isize;
            let q = q as isize;
            let taps = SINC_TAPS as isize;
            let delay = taps / 2;
            (0..len * q)
                .map(|i| {
                    // out[i] = sum_n s[n] h[i + delay - q n]
                    let centre = i + delay;
                    let n_hi = centre.div_euclid(q);
                    let n_lo = -(taps - 1 - centre).div_euclid(q);
                    (n_lo..=n_hi)
                        .filter_map(|n| {
                            let idx = if circular {
                                n.rem_euclid(len)
                            } else if (0..len).contains(&n) {
                                n
                            } else {
                                return None;
                            };
                            Some(samples[idx as usize] * h[(centre - q * n) as usize])
                        })
                        .sum()
                })
                .collect()
        }
    }
}

/// Interpolates a buffer by `q` with the hold interpolator.
///
/// `q == 1` returns an identical buffer.
pub fn oversample(signal: &IqBuffer, q: usize) -> Result<IqBuffer> {
    oversample_with(signal, q, Interpolation::Hold)
}

pub fn oversample_with(signal: &IqBuffer, q: usize, kind: Interpolation) -> Result<IqBuffer> {
    if q == 0 {
        return Err(Error::InvalidConfig("oversampling rate must be >= 1".into()));
    }
    IqBuffer::new(
        interpolate(signal.samples(), q, kind, false),
        signal.sample_rate_hz() * q as f64,
    )
}

/// Keeps every `q`-th sample, starting with the first.
pub fn decimate(signal: &IqBuffer, q: usize) -> Result<IqBuffer> {
    if q == 0 {
        return Err(Error::InvalidConfig("decimation factor must be >= 1".into()));
    }
    if q == 1 {
        return Ok(signal.clone());
    }
    let usable = signal.len() / q;
    if usable == 0 {
        return Err(Error::BufferTooShort {
            needed: q,
            available: signal.len(),
        });
    }
    IqBuffer::new(
        signal.samples().iter().step_by(q).take(usable).copied().collect(),
        signal.sample_rate_hz() / q as f64,
    )
}

fn complex_gaussian(rng: &mut ChaCha8Rng, std_per_component: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std_per_component
}

/// Adds circularly-symmetric complex Gaussian noise with per-sample variance
/// `signal_power / 10^(snr_db/10)`.
pub fn add_awgn(signal: &IqBuffer, snr_db: f64, seed: u64) -> Result<IqBuffer> {
    let power = signal.mean_power();
    if power <= 0.0 {
        return Err(Error::DegenerateInput(
            "cannot set an SNR against a zero-power signal".into(),
        ));
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidConfig("snr_db is NaN".into()));
    }
    let noise_var = power / 10f64.powf(snr_db / 10.0);
    let std = (noise_var / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    IqBuffer::new(
        signal
            .samples()
            .iter()
            .map(|&s| s + complex_gaussian(&mut rng, std))
            .collect(),
        signal.sample_rate_hz(),
    )
}

/// Multiplies by exp(j 2π f_c i / f_s).
pub fn carrier_shift(signal: &IqBuffer, carrier_freq_hz: f64) -> Result<IqBuffer> {
    if carrier_freq_hz == 0.0 {
        return Ok(signal.clone());
    }
    let step = 2.0 * PI * carrier_freq_hz / signal.sample_rate_hz();
    IqBuffer::new(
        signal
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &s)| s * Complex64::from_polar(1.0, step * i as f64))
            .collect(),
        signal.sample_rate_hz(),
    )
}

/// A synthesized recording together with its noiseless counterpart.
#[derive(Debug, Clone)]
pub struct Synthesized {
    pub signal: IqBuffer,
    pub noiseless: IqBuffer,
    pub truth: SymbolLengths,
}

/// Generates the received signal described by `cfg`.
pub fn generate_ofdm(cfg: &OfdmConfig) -> Result<(IqBuffer, SymbolLengths)> {
    let s = synthesize(cfg)?;
    Ok((s.signal, s.truth))
}

/// Like [`generate_ofdm`] but also returns the noiseless signal.
pub fn synthesize(cfg: &OfdmConfig) -> Result<Synthesized> {
    let truth = cfg.validate()?;
    let q = truth.q;
    let n_cn = truth.n_cn;
    let mut data_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0]));

    let mut clean = Vec::with_capacity(truth.n_s * cfg.symbol_count);
    for _ in 0..cfg.symbol_count {
        let qam = QamSymbolStream::random(n_cn, &mut data_rng);
        let useful = inverse_dft_unitary(qam.symbols());
        let useful = interpolate(&useful, q, cfg.interpolation, true);
        debug_assert_eq!(useful.len(), truth.n_u);
        clean.extend_from_slice(&useful[truth.n_u - truth.n_g..]);
        clean.extend_from_slice(&useful);
    }
    let clean = IqBuffer::new(clean, cfg.sample_rate_hz)?;
    let noiseless = carrier_shift(&clean, cfg.carrier_freq_hz)?;

    let signal = match cfg.snr_db {
        None => noiseless.clone(),
        Some(snr_db) => {
            let noise_seed = derive_seed(cfg.seed, &[1]);
            match cfg.noise_stage {
                NoiseStage::Receiver => add_awgn(&noiseless, snr_db, noise_seed)?,
                NoiseStage::Baseband => {
                    let power = noiseless.mean_power();
                    let target = power / 10f64.powf(snr_db / 10.0);
                    let base_var = target / white_gain(cfg.interpolation, q);
                    let std = (base_var / 2.0).sqrt();
                    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
                    let base: Vec<Complex64> = (0..noiseless.len() / q)
                        .map(|_| complex_gaussian(&mut rng, std))
                        .collect();
                    let noise = interpolate(&base, q, cfg.interpolation, false);
                    IqBuffer::new(
                        noiseless
                            .samples()
                            .iter()
                            .zip(&noise)
                            .map(|(s, n)| s + n)
                            .collect(),
                        cfg.sample_rate_hz,
                    )?
                }
            }
        }
    };
    Ok(Synthesized {
        signal,
        noiseless,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::normalized_autocorr_objective;

    fn reference(q: usize, snr: Option<f64>, seed: u64) -> OfdmConfig {
        OfdmConfig::default()
            .with_oversampling(q)
            .with_snr(snr)
            .with_seed(seed)
    }

    #[test]
    fn constellation_has_unit_power() {
        let c = qam16_constellation();
        let p = c.iter().map(|s| s.norm_sqr()).sum::<f64>() / 16.0;
        assert!((p - 1.0).abs() < 1e-12);
        // Gray: horizontal neighbours differ by one bit
        for w in 0u8..16 {
            for v in 0u8..16 {
                let d = (qam16_map(w) - qam16_map(v)).norm() * 10f64.sqrt();
                if (d - 2.0).abs() < 1e-9 {
                    assert_eq!((w ^ v).count_ones(), 1, "{w:04b} vs {v:04b}");
                }
            }
        }
    }

    #[test]
    fn reference_config_length() {
        let (sig, truth) = generate_ofdm(&reference(1, Some(60.0), 3)).unwrap();
        assert_eq!(sig.len(), 3200);
        assert_eq!(truth.n_s, 160);
    }

    #[test]
    fn cyclic_prefix_copies_symbol_tail() {
        for (q, kind) in [
            (1, Interpolation::Hold),
            (4, Interpolation::Hold),
            (2, Interpolation::WindowedSinc),
        ] {
            let mut cfg = reference(q, None, 11);
            cfg.interpolation = kind;
            let s = synthesize(&cfg).unwrap();
            let t = s.truth;
            for block in s.noiseless.samples().chunks(t.n_s) {
                assert_eq!(&block[..t.n_g], &block[t.n_u..t.n_s]);
            }
        }
    }

    #[test]
    fn noiseless_power_is_normalized() {
        for seed in 0..5 {
            let s = synthesize(&reference(1, None, seed)).unwrap();
            assert!((s.noiseless.mean_power() - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn measured_snr_matches_request() {
        for stage in [NoiseStage::Baseband, NoiseStage::Receiver] {
            for seed in 0..4 {
                let mut cfg = reference(1, Some(0.0), seed);
                cfg.symbol_count = 100;
                cfg.noise_stage = stage;
                let s = synthesize(&cfg).unwrap();
                let noise: f64 = s
                    .signal
                    .samples()
                    .iter()
                    .zip(s.noiseless.samples())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                let sig: f64 = s.noiseless.samples().iter().map(|x| x.norm_sqr()).sum();
                let snr = 10.0 * (sig / noise).log10();
                assert!(snr.abs() < 0.2, "{stage:?} seed {seed}: {snr}");
            }
        }
    }

    #[test]
    fn cp_lag_dominates_noiseless_correlation() {
        let s = synthesize(&reference(1, None, 5)).unwrap();
        let sig = &s.noiseless;
        let n_u = s.truth.n_u;
        let window = 300;
        let at_nu = normalized_autocorr_objective(sig, n_u, window).unwrap();
        assert!((at_nu - 0.2).abs() < 0.1, "{at_nu}");
        for k in 1..=window {
            if k.abs_diff(n_u) > 2 {
                let v = normalized_autocorr_objective(sig, k, window).unwrap();
                assert!(v < at_nu, "lag {k}: {v} >= {at_nu}");
            }
        }
    }

    #[test]
    fn awgn_vanishes_at_huge_snr() {
        let s = synthesize(&reference(1, None, 2)).unwrap();
        let noisy = add_awgn(&s.noiseless, 300.0, 9).unwrap();
        for (a, b) in noisy.samples().iter().zip(s.noiseless.samples()) {
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-3));
        }
    }

    #[test]
    fn awgn_rejects_zero_signal() {
        let z = IqBuffer::new(vec![Complex64::new(0.0, 0.0); 16], 1.0).unwrap();
        assert!(matches!(add_awgn(&z, 0.0, 1), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn awgn_noise_power_sample_variance() {
        let ones = IqBuffer::new(vec![Complex64::new(1.0, 0.0); 1_000_000], 1.0).unwrap();
        let noisy = add_awgn(&ones, 0.0, 42).unwrap();
        let n = noisy.len() as f64;
        let p = noisy
            .samples()
            .iter()
            .map(|s| (s - Complex64::new(1.0, 0.0)).norm_sqr())
            .sum::<f64>()
            / n;
        assert!((p - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn oversample_and_decimate_lengths() {
        let s = synthesize(&reference(1, None, 1)).unwrap().signal;
        let head = IqBuffer::new(s.samples()[..160].to_vec(), s.sample_rate_hz()).unwrap();
        assert_eq!(oversample(&head, 1).unwrap(), head);
        let up = oversample(&head, 4).unwrap();
        assert_eq!(up.len(), 640);
        assert_eq!(decimate(&up, 4).unwrap().len(), 160);
        assert_eq!(decimate(&up, 4).unwrap().samples(), head.samples());
        assert_eq!(decimate(&head, 1).unwrap(), head);
        assert!(oversample(&head, 0).is_err());
    }

    #[test]
    fn sinc_interpolation_passes_baseband_samples() {
        // a windowed sinc is zero at nonzero multiples of q, so original
        // samples reappear at phase 0
        let s = synthesize(&reference(1, None, 4)).unwrap().signal;
        let up = oversample_with(&s, 4, Interpolation::WindowedSinc).unwrap();
        for (i, x) in s.samples().iter().enumerate().skip(16).take(100) {
            assert!((up.samples()[4 * i] - x).norm() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_signal() {
        let a = generate_ofdm(&reference(2, Some(-3.0), 77)).unwrap().0;
        let b = generate_ofdm(&reference(2, Some(-3.0), 77)).unwrap().0;
        let c = generate_ofdm(&reference(2, Some(-3.0), 78)).unwrap().0;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn carrier_shift_preserves_power() {
        let mut cfg = reference(1, None, 1);
        cfg.carrier_freq_hz = 10e6;
        let s = synthesize(&cfg).unwrap();
        assert!((s.noiseless.mean_power() - 1.0).abs() < 0.02);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0, 0]), derive_seed(1, &[0, 1]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(5, &[2, 3]), derive_seed(5, &[2, 3]));
    }
}
