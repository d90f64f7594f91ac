//! The SNR-switched estimator. Hints at or above -5 dB take the correlation
//! path; lower hints take the substitution path.

use ofdm_blind::*;

fn main() -> Result<()> {
    for snr in [10.0, -5.0, -10.0] {
        let syn = synthesize(
            &OfdmConfig::default()
                .with_oversampling(2)
                .with_snr(Some(snr))
                .with_seed(5),
        )?;
        let params = EstimatorParams::for_lengths(&syn.truth);
        match estimate_hybrid(&syn.signal, snr, &params) {
            Ok(r) => println!(
                "{snr:>5} dB: N_s={:?} N_u={:?} q={:?} N_cn={:?} via {}",
                r.n_s_hat,
                r.n_u_hat,
                r.q_hat,
                r.n_cn_hat,
                if r.accepted_lengths.is_empty() {
                    "correlation"
                } else {
                    "substitution"
                }
            ),
            Err(e) => println!("{snr:>5} dB: {e}"),
        }
    }
    Ok(())
}
