//! Blind estimation of OFDM symbol parameters from raw complex baseband.
//!
//! Given only a recording, the estimators recover the symbol length `N_s`,
//! the useful length `N_u`, the oversampling rate `q` and the carrier count
//! `N_cn`. [`synth`] generates test recordings, [`harness`] runs Monte-Carlo
//! sweeps over SNR and [`cli`] backs the `ofdm-blind` binary.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod spectral;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use estimators::*;
pub use harness::{run_sweep, SweepRow, SweepSpec};
pub use synth::{generate_ofdm, synthesize, Synthesized};
pub use types::*;
