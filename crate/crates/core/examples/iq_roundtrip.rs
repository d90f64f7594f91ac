//! Writes a recording in the CLI's IQ format, reads it back and estimates
//! from the file.

use ofdm_blind::cli::{quantize_f32, read_iq, sidecar_path, write_iq, IqFileMeta, IQ_FORMAT_TAG};
use ofdm_blind::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let cfg = OfdmConfig::default().with_snr(Some(15.0)).with_seed(2);
    let syn = synthesize(&cfg)?;
    let dir = std::env::temp_dir().join("ofdm-blind-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("capture.cf32");
    let meta = IqFileMeta {
        format_tag: IQ_FORMAT_TAG.into(),
        sample_rate_hz: cfg.sample_rate_hz,
        truth: Some(cfg.clone()),
        lengths: Some(syn.truth),
    };
    write_iq(&path, &syn.signal, &meta)?;
    println!("wrote {} and {}", path.display(), sidecar_path(&path).display());

    let (back, meta) = read_iq(&path)?;
    assert_eq!(back, quantize_f32(&syn.signal));
    println!(
        "read {} samples at {} Hz, bit-exact after f32 rounding",
        back.len(),
        meta.sample_rate_hz
    );

    let r = estimate_hybrid(&back, 15.0, &EstimatorParams::default())?;
    println!(
        "estimate: N_s={:?} N_u={:?} N_cn={:?}",
        r.n_s_hat, r.n_u_hat, r.n_cn_hat
    );
    Ok(())
}
