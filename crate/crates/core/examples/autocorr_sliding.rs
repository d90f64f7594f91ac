//! The two correlation estimators: lag search for the useful length, then the
//! sliding cyclic-prefix profile for the symbol length.

use ofdm_blind::spectral::sliding_cp_profile;
use ofdm_blind::*;

fn main() -> Result<()> {
    let syn = synthesize(&OfdmConfig::default().with_snr(Some(10.0)).with_seed(3))?;
    let n_u = estimate_nu_autocorr(&syn.signal, &AutocorrParams::new(320))?;
    println!("useful length from the lag search: {n_u}");

    let sliding = SlidingParams::default();
    let profile = sliding_cp_profile(&syn.signal, n_u, sliding.window)?;
    let v = profile.values();
    let preview: Vec<String> = v.iter().step_by(20).take(24).map(|x| format!("{x:.2}")).collect();
    println!(
        "sliding profile ({} points, every 20th): {}",
        v.len(),
        preview.join(" ")
    );

    let n_s = estimate_ns_sliding(&syn.signal, n_u, &sliding)?;
    println!(
        "symbol length from the profile peaks: {n_s} (truth {})",
        syn.truth.n_s
    );
    Ok(())
}
