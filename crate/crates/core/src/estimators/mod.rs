//! Blind estimators and their building blocks.

pub mod autocorr;
pub mod hybrid;
pub mod oversampling;
pub mod peaks;
pub mod pipeline;
pub mod progression;
pub mod sliding;
pub mod substitution;
pub mod traversal;

pub use autocorr::{estimate_nu_autocorr, AutocorrParams};
pub use hybrid::{estimate_correlation_path, estimate_hybrid};
pub use oversampling::{estimate_oversampling, OversamplingEstimate, OversamplingParams};
pub use peaks::{detect_peaks, PeakDetectParams};
pub use pipeline::{run_method, EstimatorParams};
pub use progression::{progression_stats, MIN_PAIR_SPACING};
pub use sliding::{estimate_ns_sliding, ns_from_profile, SlidingParams};
pub use substitution::{carriers_from_n_os, estimate_carriers_substitution, SubstitutionParams};
pub use traversal::{
    estimate_ns_traversal, evaluate_candidate, resolve_lag, traverse_with_lag, CandidateEval,
    TraversalOutcome,
};
