//! Nadaraya-Watson conditional-mean estimation, residual construction, the
//! first-difference drift smoother and its cross-validated bandwidth.

use crate::error::{Error, Result};
use crate::kernel::{admissible_window, Bandwidth, Kernel, DEFAULT_EPS0};
use crate::series::Series;
use crate::sorted::{scan_windows, sort_lags, Accumulator, RADIUS_GUARD};

/// A fitted conditional mean: `fitted[t] = ghat(X_t-1)` and
/// `residuals[t] = X_t - fitted[t]` for `t = 1..=T` (0-indexed here).
///
/// Internally everything is computed on the series centered at `X_0`; the
/// kernel weights only ever see lag differences, so residuals and every
/// statistic built from them are exactly translation invariant whenever the
/// shift itself is exactly representable.
#[derive(Debug, Clone)]
pub struct NwFit {
    fitted: Vec<f64>,
    residuals: Vec<f64>,
    h: Bandwidth,
}

impl NwFit {
    pub fn fitted(&self) -> &[f64] {
        &self.fitted
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn h(&self) -> Bandwidth {
        self.h
    }
}

/// Normalized kernel weights of every lagged observation at the point `x`:
/// `W_s proportional to K((X_(s-1) - x) / h)`, summing to one.
pub fn nw_weights(x: f64, series: &Series, kernel: Kernel, h: Bandwidth) -> Result<Vec<f64>> {
    let hv = h.get();
    let raw: Vec<f64> = series
        .lags()
        .iter()
        .map(|&lag| kernel.evaluate((lag - x) / hv))
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::NoSupport { x });
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Residuals of the kernel regression of `responses[i]` on `lags[i]`,
/// evaluated at the sample points. Works on any regression design; both
/// arrays are centered at `lags[0]` first so that the result is exactly
/// translation invariant under exactly representable shifts. The own
/// observation contributes `K(0) > 0` to each denominator, so no point can
/// lose support.
pub(crate) fn nw_residuals_design(
    lags: &[f64],
    responses: &[f64],
    kernel: Kernel,
    h: Bandwidth,
) -> Vec<f64> {
    debug_assert_eq!(lags.len(), responses.len());
    let c = lags[0];
    let lags_c: Vec<f64> = lags.iter().map(|v| v - c).collect();
    let resp_c: Vec<f64> = responses.iter().map(|v| v - c).collect();

    let sorted = sort_lags(&lags_c);
    let hv = h.get();
    let radius = kernel.support_radius() * hv * RADIUS_GUARD;

    let mut residuals = vec![0.0; lags.len()];
    scan_windows(&sorted.values, radius, |j, lo, hi| {
        let xj = sorted.values[j];
        let mut num = 0.0;
        let mut den = 0.0;
        for k in lo..hi {
            let kv = kernel.evaluate((sorted.values[k] - xj) / hv);
            num += kv * resp_c[sorted.perm[k] as usize];
            den += kv;
        }
        let ghat = num / den;
        let orig = sorted.perm[j] as usize;
        residuals[orig] = resp_c[orig] - ghat;
    });
    residuals
}

/// Fit the conditional mean at every sample point. Never fails: the own
/// observation contributes `K(0) > 0` to each denominator.
pub fn nw_fit(series: &Series, kernel: Kernel, h: Bandwidth) -> NwFit {
    let residuals = nw_residuals_design(series.lags(), series.responses(), kernel, h);
    let fitted = series
        .responses()
        .iter()
        .zip(&residuals)
        .map(|(x, r)| x - r)
        .collect();
    NwFit {
        fitted,
        residuals,
        h,
    }
}

/// Drift estimate at `x`: the kernel smooth of the first differences
/// `X_t - X_(t-1)` against the lagged values.
pub fn delta_hat(x: f64, series: &Series, kernel: Kernel, h_cv: Bandwidth) -> Result<f64> {
    let hv = h_cv.get();
    let mut num = 0.0;
    let mut den = 0.0;
    for (&lag, d) in series.lags().iter().zip(series.diffs()) {
        let kv = kernel.evaluate((lag - x) / hv);
        num += kv * d;
        den += kv;
    }
    if den <= 0.0 {
        return Err(Error::NoSupport { x });
    }
    Ok(num / den)
}

/// Leave-one-out cross-validation score for one candidate bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvScore {
    pub h: Bandwidth,
    /// Sum of squared leave-one-out prediction errors over usable points.
    pub score: f64,
    pub used: usize,
    pub skipped: usize,
}

/// Outcome of [`cv_bandwidth`]: the selected bandwidth plus per-candidate
/// diagnostics for display.
#[derive(Debug, Clone)]
pub struct CvSelection {
    pub h: Bandwidth,
    pub scores: Vec<CvScore>,
}

impl CvSelection {
    /// Candidates where more than 10% of observations lost their
    /// leave-one-out support; selection on those is unreliable.
    pub fn sparse_support_warnings(&self) -> Vec<String> {
        self.scores
            .iter()
            .filter(|s| s.used > 0 && 10 * s.skipped > s.used + s.skipped)
            .map(|s| {
                format!(
                    "h = {}: {} of {} observations had empty leave-one-out support",
                    s.h.get(),
                    s.skipped,
                    s.used + s.skipped
                )
            })
            .collect()
    }
}

/// Select a bandwidth for [`delta_hat`] by leave-one-out cross-validation of
/// the first-difference smoother. Candidates for which every observation is
/// skipped are excluded; ties break to the smallest bandwidth.
pub fn cv_bandwidth(series: &Series, kernel: Kernel, grid: &[Bandwidth]) -> Result<CvSelection> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty bandwidth grid".into()));
    }
    let t = series.t();
    let lags = series.lags();
    let diffs = series.diffs();
    let sorted = sort_lags(lags);
    let k0 = kernel.evaluate(0.0);

    let mut candidates: Vec<Bandwidth> = grid.to_vec();
    candidates.sort_by(|a, b| a.get().total_cmp(&b.get()));

    let mut scores = Vec::with_capacity(candidates.len());
    for &h in &candidates {
        let hv = h.get();
        let radius = kernel.support_radius() * hv * RADIUS_GUARD;
        let mut acc = Accumulator::default();
        let mut used = 0usize;
        let mut skipped = 0usize;
        scan_windows(&sorted.values, radius, |j, lo, hi| {
            let xj = sorted.values[j];
            let mut num = 0.0;
            let mut den = 0.0;
            for k in lo..hi {
                let kv = kernel.evaluate((sorted.values[k] - xj) / hv);
                num += kv * diffs[sorted.perm[k] as usize];
                den += kv;
            }
            let own = diffs[sorted.perm[j] as usize];
            let den_loo = den - k0;
            if den_loo > 0.0 {
                let pred = (num - k0 * own) / den_loo;
                let err = own - pred;
                acc.add(err * err);
                used += 1;
            } else {
                skipped += 1;
            }
        });
        debug_assert_eq!(used + skipped, t);
        scores.push(CvScore {
            h,
            score: acc.total(),
            used,
            skipped,
        });
    }

    let best = scores
        .iter()
        .filter(|s| s.used > 0)
        .min_by(|a, b| a.score.total_cmp(&b.score))
        .ok_or(Error::CvAllExcluded)?;
    Ok(CvSelection {
        h: best.h,
        scores,
    })
}

/// Default cross-validation grid: 25 log-spaced bandwidths spanning the
/// admissible window with a factor-of-two margin on both ends.
pub fn default_cv_grid(t: usize) -> Result<Vec<Bandwidth>> {
    let (h_lo, h_hi) = admissible_window(t, DEFAULT_EPS0)?;
    let lo = h_lo / 2.0;
    let hi = 2.0 * h_hi;
    let n = 25;
    (0..n)
        .map(|i| {
            let frac = i as f64 / (n - 1) as f64;
            Bandwidth::new(lo * (hi / lo).powf(frac))
        })
        .collect()
}
