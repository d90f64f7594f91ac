//! Synthesize a noisy recording and run every estimator on it.
//!
//! `cargo run --example synth_and_estimate -- [snr_db]`

use ofdm_blind::*;

fn main() -> Result<()> {
    let snr: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5.0);
    let cfg = OfdmConfig::default().with_snr(Some(snr)).with_seed(7);
    let syn = synthesize(&cfg)?;
    let t = syn.truth;
    println!(
        "truth: N_s={} N_u={} N_g={} q={} N_cn={} ({} samples at {snr} dB)",
        t.n_s,
        t.n_u,
        t.n_g,
        t.q,
        t.n_cn,
        syn.signal.len()
    );
    let params = EstimatorParams::for_lengths(&t);
    for m in Method::ALL {
        match run_method(&syn.signal, m, snr, &params) {
            Ok(r) => println!(
                "{:>12}: N_s={:?} N_u={:?} q={:?} N_cn={:?}",
                m.as_str(),
                r.n_s_hat,
                r.n_u_hat,
                r.q_hat,
                r.n_cn_hat
            ),
            Err(e) => println!("{:>12}: failed ({e})", m.as_str()),
        }
    }
    Ok(())
}
