//! Carrier count at low SNR: estimate q, decimate, traverse at baseband and
//! round the baseband symbol length down to a power of two.

use ofdm_blind::*;

fn main() -> Result<()> {
    for snr in [None, Some(0.0), Some(-5.0)] {
        let cfg = OfdmConfig::default()
            .with_oversampling(4)
            .with_snr(snr)
            .with_seed(21);
        let syn = synthesize(&cfg)?;
        let params = EstimatorParams::for_lengths(&syn.truth).substitution;
        let label = snr.map_or("noiseless".into(), |s| format!("{s} dB"));
        match estimate_carriers_substitution(&syn.signal, &params) {
            Ok(r) => println!(
                "{label:>9}: q={:?} N_os={:?} N_cn={:?} N_u={:?} N_s={:?}",
                r.q_hat, r.n_os_hat, r.n_cn_hat, r.n_u_hat, r.n_s_hat
            ),
            Err(e) => println!("{label:>9}: {e}"),
        }
    }
    println!(
        "carriers for baseband lengths 72, 160, 320: {}, {}, {}",
        carriers_from_n_os(72)?,
        carriers_from_n_os(160)?,
        carriers_from_n_os(320)?
    );
    Ok(())
}
