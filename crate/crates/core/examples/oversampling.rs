//! Oversampling rate from the line spectrum of the lag-1 product.

use ofdm_blind::*;

fn main() -> Result<()> {
    for q in [1, 2, 4, 8] {
        for snr in [None, Some(0.0), Some(-20.0)] {
            let cfg = OfdmConfig::default()
                .with_oversampling(q)
                .with_snr(snr)
                .with_seed(q as u64);
            let syn = synthesize(&cfg)?;
            let est = estimate_oversampling(&syn.signal, &OversamplingParams::default())?;
            let shown: Vec<usize> = est.peaks.iter().copied().take(8).collect();
            println!(
                "q={q} snr={:>9}: q_hat={} spacing={:.1} peaks {:?}{}",
                snr.map_or("noiseless".into(), |s| format!("{s} dB")),
                est.q,
                est.spacing,
                shown,
                if est.peaks.len() > 8 { " ..." } else { "" }
            );
        }
    }
    Ok(())
}
