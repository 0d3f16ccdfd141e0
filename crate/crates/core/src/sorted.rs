//! Shared sorted-window machinery for the compact-kernel fast paths.

/// Lag values sorted ascending together with the permutation back to the
/// original index. Sorting is stable on (value, index) so the order, and
/// therefore every downstream summation order, is fully deterministic.
pub(crate) struct SortedLags {
    pub values: Vec<f64>,
    pub perm: Vec<u32>,
}

pub(crate) fn sort_lags(lags: &[f64]) -> SortedLags {
    let mut perm: Vec<u32> = (0..lags.len() as u32).collect();
    perm.sort_by(|&a, &b| lags[a as usize].total_cmp(&lags[b as usize]));
    let values = perm.iter().map(|&i| lags[i as usize]).collect();
    SortedLags { values, perm }
}

/// Multiplicative guard on the window radius. The scan predicate
/// `|d| <= radius` must never exclude a pair whose kernel value `K(d/h)` is
/// nonzero; the guard absorbs the one rounding in `d / h`, and the kernel
/// evaluation itself then decides membership.
pub(crate) const RADIUS_GUARD: f64 = 1.0 + 1e-12;

/// Walk the sorted values with a two-pointer window of half-width `radius`,
/// calling `visit(j, lo, hi)` for every position `j` with its window
/// `[lo, hi)` (always containing `j`). Runs in O(n + total window size).
pub(crate) fn scan_windows<F: FnMut(usize, usize, usize)>(values: &[f64], radius: f64, mut visit: F) {
    let n = values.len();
    let mut lo = 0usize;
    let mut hi = 0usize;
    for j in 0..n {
        if hi < j + 1 {
            hi = j + 1;
        }
        while hi < n && values[hi] - values[j] <= radius {
            hi += 1;
        }
        while values[j] - values[lo] > radius {
            lo += 1;
        }
        visit(j, lo, hi);
    }
}

/// Neumaier compensated accumulator; keeps long sums deterministic to the
/// last bit for a fixed visiting order and immune to cancellation drift.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_cover_exactly_the_radius() {
        let values = vec![0.0, 0.5, 1.0, 2.0, 2.4, 10.0];
        let mut seen = Vec::new();
        scan_windows(&values, 1.0, |j, lo, hi| seen.push((j, lo, hi)));
        assert_eq!(
            seen,
            vec![
                (0, 0, 3), // 0.0: {0.0, 0.5, 1.0}
                (1, 0, 3),
                (2, 0, 4), // 1.0: {0.0, .., 2.0}
                (3, 2, 5),
                (4, 3, 5),
                (5, 5, 6), // 10.0 alone
            ]
        );
    }

    #[test]
    fn sort_is_stable_on_ties() {
        let lags = vec![1.0, 0.0, 1.0, -1.0];
        let sorted = sort_lags(&lags);
        assert_eq!(sorted.values, vec![-1.0, 0.0, 1.0, 1.0]);
        assert_eq!(sorted.perm, vec![3, 1, 0, 2]);
    }

    #[test]
    fn accumulator_handles_cancellation() {
        let mut acc = Accumulator::default();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.total(), 1.0);
    }
}
