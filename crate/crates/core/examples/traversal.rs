//! Symbol-length traversal: evaluates each candidate length and prints the
//! progression statistics behind the accept decision.
//!
//! `cargo run --example traversal -- [snr_db]`

use ofdm_blind::*;

fn main() -> Result<()> {
    let snr: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.0);
    let syn = synthesize(&OfdmConfig::default().with_snr(Some(snr)).with_seed(11))?;
    let params = TraversalParams::around(syn.truth.n_s);
    let lag = resolve_lag(&syn.signal, &params)?;
    println!(
        "segment lag {lag}, candidates {}..={}",
        params.n_min, params.n_max
    );
    for n_p in params.n_min..=params.n_max {
        let e = evaluate_candidate(&syn.signal, n_p, lag, &params)?;
        if e.qualifies || n_p.abs_diff(syn.truth.n_s) <= 3 {
            println!(
                "  n_p={n_p:>4} on-lattice {:>3}/{:<3} spacing {:>3}{}",
                e.stats.n_use,
                e.stats.n_all,
                e.stats.spacing,
                if e.qualifies { "  accepted" } else { "" }
            );
        }
    }
    match estimate_ns_traversal(&syn.signal, &params) {
        Ok(out) => println!(
            "N_s = {} from {:?} (truth {})",
            out.n_s, out.accepted, syn.truth.n_s
        ),
        Err(e) => println!("traversal failed: {e}"),
    }
    Ok(())
}
