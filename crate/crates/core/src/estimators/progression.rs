use crate::types::{PeakSet, ProgressionResult};

/// Seed pairs closer than this are ignored.
pub const MIN_PAIR_SPACING: usize = 3;

/// Finds the arithmetic progression that covers the most detected peaks.
///
/// Seed pairs `(i, j)` come from the first half of the peak list
/// (1-based `i < n/2`, `i < j < n/2 + 2`) with spacing greater than
/// [`MIN_PAIR_SPACING`]. From the second seed the progression steps forward by
/// the seed spacing until it passes the last peak; each step that lands within
/// `tolerance` bins of a peak counts. The first pair with the highest count
/// wins.
pub fn progression_stats(peaks: &PeakSet, tolerance: usize) -> ProgressionResult {
    let k = peaks.abscissas();
    let n_all = k.len();
    let mut best = ProgressionResult {
        n_use: 0,
        n_all,
        spacing: 0,
    };
    if n_all < 2 {
        return best;
    }
    let k_max = k[n_all - 1];
    // near[x]: some peak lies within `tolerance` of x; the scan never passes
    // k_max + spacing, and spacings are below k_max
    let span = 2 * k_max + tolerance + 2;
    let mut near = vec![false; span];
    for &p in k {
        let lo = p.saturating_sub(tolerance);
        let hi = (p + tolerance).min(span - 1);
        near[lo..=hi].iter_mut().for_each(|x| *x = true);
    }
    // 1-based bounds: i < n/2 and j < n/2 + 2, compared as 2i < n and 2j < n + 4
    let mut i = 1;
    while 2 * i < n_all {
        let mut j = i + 1;
        while 2 * j < n_all + 4 && j <= n_all {
            let spacing = k[j - 1] - k[i - 1];
            let start = k[j - 1];
            let steps = if start < k_max {
                (k_max - start).div_ceil(spacing.max(1))
            } else {
                0
            };
            // a pair that cannot beat the best count is skipped
            if spacing > MIN_PAIR_SPACING && 2 + steps > best.n_use {
                let count = 2 + (1..=steps).filter(|m| near[start + m * spacing]).count();
                if count > best.n_use {
                    best.n_use = count;
                    best.spacing = spacing;
                }
            }
            j += 1;
        }
        i += 1;
    }
    best
}
