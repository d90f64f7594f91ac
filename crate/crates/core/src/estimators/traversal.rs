use crate::error::{Error, Result};
use crate::estimators::autocorr::{estimate_nu_autocorr, AutocorrParams};
use crate::estimators::peaks::{detect_peaks, PeakDetectParams};
use crate::estimators::progression::progression_stats;
use crate::spectral::{max_segments, segment_average, spectrum_magnitude};
use crate::types::{IqBuffer, ProgressionResult, SegmentLag, TraversalParams};

/// Outcome of testing one candidate symbol length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEval {
    pub n_p: usize,
    pub stats: ProgressionResult,
    pub qualifies: bool,
}

/// Result of a traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct TraversalOutcome {
    /// Rounded mean of the final contiguous run of accepted lengths.
    pub n_s: usize,
    /// Every accepted candidate, in search order.
    pub accepted: Vec<usize>,
    /// Lag used for the segment products.
    pub lag: usize,
}

/// Resolves the product lag for a traversal over `signal`.
pub fn resolve_lag(signal: &IqBuffer, params: &TraversalParams) -> Result<usize> {
    match params.lag {
        SegmentLag::Zero => Ok(0),
        SegmentLag::Fixed(l) => Ok(l),
        SegmentLag::EstimatedUseful => estimate_nu_autocorr(signal, &AutocorrParams::new(params.n_max)),
    }
}

/// Tests whether candidate `n_p` produces a harmonic comb with spacing `n_o`.
pub fn evaluate_candidate(
    signal: &IqBuffer,
    n_p: usize,
    lag: usize,
    params: &TraversalParams,
) -> Result<CandidateEval> {
    let n_ch = max_segments(signal.len(), n_p, params.n_o, lag, params.stride);
    if n_ch == 0 {
        return Err(Error::BufferTooShort {
            needed: params.n_o * n_p + lag,
            available: signal.len(),
        });
    }
    let avg = segment_average(signal, n_p, params.n_o, n_ch, lag, params.stride)?;
    let spectrum = spectrum_magnitude(&avg)?;
    let peaks = detect_peaks(&spectrum, &PeakDetectParams::segment_spectrum());
    let stats = progression_stats(&peaks, params.membership_tolerance);
    let enough = if params.literal_count_predicate {
        stats.n_all > params.n_min
    } else {
        stats.n_all >= params.min_peak_count
    };
    let qualifies = stats.fraction() > params.majority_threshold && enough && stats.spacing == params.n_o;
    Ok(CandidateEval {
        n_p,
        stats,
        qualifies,
    })
}

fn tail_run(accepted: &[usize]) -> &[usize] {
    let mut start = accepted.len().saturating_sub(1);
    while start > 0 && accepted[start - 1] + 1 == accepted[start] {
        start -= 1;
    }
    &accepted[start..]
}

/// Symbol length by traversing candidates `n_min..n_max` with a known lag.
///
/// The search stops at the first rejected candidate that follows a
/// contiguous accepted run of at least `min_run` lengths.
pub fn traverse_with_lag(
    signal: &IqBuffer,
    lag: usize,
    params: &TraversalParams,
) -> Result<TraversalOutcome> {
    params.validate()?;
    let mut accepted: Vec<usize> = Vec::new();
    for n_p in params.n_min..params.n_max {
        let eval = evaluate_candidate(signal, n_p, lag, params)?;
        if eval.qualifies {
            accepted.push(n_p);
        } else if accepted.last() == Some(&(n_p - 1)) && tail_run(&accepted).len() >= params.min_run {
            break;
        }
    }
    if accepted.is_empty() {
        return Err(Error::failed("traversal", "no candidate length qualified"));
    }
    let tail = tail_run(&accepted);
    let mean = tail.iter().sum::<usize>() as f64 / tail.len() as f64;
    Ok(TraversalOutcome {
        n_s: (mean + 0.5).floor() as usize,
        accepted,
        lag,
    })
}

/// Symbol length by traversal; the lag comes from `params.lag`.
pub fn estimate_ns_traversal(signal: &IqBuffer, params: &TraversalParams) -> Result<TraversalOutcome> {
    params.validate()?;
    let lag = resolve_lag(signal, params)?;
    traverse_with_lag(signal, lag, params)
}
