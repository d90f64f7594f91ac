//! A small Monte-Carlo sweep written as CSV to stdout.
//!
//! `cargo run --release --example sweep -- [trials]`

use ofdm_blind::harness::write_csv;
use ofdm_blind::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let grid = (-4..=2).map(|i| Some(5.0 * i as f64)).chain([None]).collect();
    let spec = SweepSpec::new(OfdmConfig::default(), grid, trials, Method::ALL.to_vec());
    let rows = run_sweep(&spec)?;
    write_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
