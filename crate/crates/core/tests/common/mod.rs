#![allow(dead_code)]

use ofdm_blind::{PeakSet, ProgressionResult, MIN_PAIR_SPACING};

/// Brute-force progression count: for every admissible seed pair, list the
/// lattice points the scan visits and test each against every peak.
pub fn progression_oracle(k: &[usize], tolerance: usize) -> ProgressionResult {
    let n = k.len();
    let mut best = ProgressionResult {
        n_use: 0,
        n_all: n,
        spacing: 0,
    };
    if n < 2 {
        return best;
    }
    let k_max = *k.iter().max().unwrap();
    // 1-based seeds i < n/2, i < j < n/2 + 2, compared in halves to stay exact
    let pairs = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
    for (i, j) in pairs.filter(|&(i, j)| 2 * i < n && 2 * j < n + 4) {
        let d = k[j - 1] - k[i - 1];
        if d <= MIN_PAIR_SPACING {
            continue;
        }
        let steps = if k[j - 1] < k_max {
            (k_max - k[j - 1]).div_ceil(d)
        } else {
            0
        };
        let hits = (1..=steps)
            .map(|m| k[j - 1] + m * d)
            .filter(|&x| k.iter().any(|&p| p.abs_diff(x) <= tolerance))
            .count();
        if 2 + hits > best.n_use {
            best.n_use = 2 + hits;
            best.spacing = d;
        }
    }
    best
}

/// Every subset of `0..16` with at most `max_size` elements, as a bitmask.
pub fn small_subsets(max_size: u32) -> impl Iterator<Item = PeakSet> {
    (0u32..1 << 16)
        .filter(move |m| m.count_ones() <= max_size)
        .map(|m| PeakSet::new((0..16).filter(|b| m & (1 << b) != 0).collect()).unwrap())
}
