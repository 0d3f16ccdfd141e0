//! Test statistics: the paired-residual kernel statistic `M_T(h)`, its
//! variance normalizer, the studentized `L_T(h)`, the triple-sum diagnostic
//! `N_T(h)`, the theoretical variance constant, and the Dickey-Fuller
//! comparator `L_0`.

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, Kernel};
use crate::series::Series;
use crate::sorted::{scan_windows, sort_lags, Accumulator, RADIUS_GUARD};
use serde::{Deserialize, Serialize};

/// Result of the studentized kernel test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    /// The double-sum statistic `M_T(h)`.
    pub m_value: f64,
    /// `sigma_hat_T(h)`, the square root of the variance estimate.
    pub sigma_hat: f64,
    /// `L_T(h) = M_T(h) / sigma_hat_T(h)`.
    pub l_value: f64,
    pub h: Bandwidth,
    #[serde(rename = "T")]
    pub t: usize,
    /// Ordered pairs `(s, t)`, `s != t`, with nonzero kernel weight; always
    /// even because the kernel is symmetric.
    pub pair_count: usize,
}

/// Dickey-Fuller comparator output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfOutcome {
    pub beta_hat: f64,
    pub sigma_hat: f64,
    pub l0: f64,
}

/// Shared pair scan: unordered-pair sums of `r_s K r_t` and
/// `r_s^2 K^2 r_t^2` over pairs with nonzero kernel weight, plus the
/// unordered pair count. Summation runs in sorted-lag order with compensated
/// accumulation, so the result is independent of the caller's threading.
fn pair_sums(residuals: &[f64], lags: &[f64], kernel: Kernel, h: Bandwidth) -> (f64, f64, usize) {
    debug_assert_eq!(residuals.len(), lags.len());
    let sorted = sort_lags(lags);
    let resid: Vec<f64> = sorted.perm.iter().map(|&i| residuals[i as usize]).collect();
    let hv = h.get();
    let radius = kernel.support_radius() * hv * RADIUS_GUARD;

    let mut m_acc = Accumulator::default();
    let mut v_acc = Accumulator::default();
    let mut pairs = 0usize;
    scan_windows(&sorted.values, radius, |j, _lo, hi| {
        let xj = sorted.values[j];
        let rj = resid[j];
        for k in (j + 1)..hi {
            let kv = kernel.evaluate((sorted.values[k] - xj) / hv);
            if kv != 0.0 {
                let rk = resid[k];
                m_acc.add(rj * kv * rk);
                let cross = rj * rj * (kv * kv) * (rk * rk);
                v_acc.add(cross);
                pairs += 1;
            }
        }
    });
    (m_acc.total(), v_acc.total(), pairs)
}

/// `M_T = sum over ordered pairs s != t of u_s K((X_(s-1) - X_(t-1))/h) u_t`,
/// computed as twice the sum over unordered pairs (the kernel is symmetric).
pub fn m_stat(residuals: &[f64], lags: &[f64], kernel: Kernel, h: Bandwidth) -> f64 {
    let (m, _, _) = pair_sums(residuals, lags, kernel, h);
    2.0 * m
}

/// Variance estimate `sigma_T^2 = 2 * sum over ordered pairs s != t of
/// u_s^2 K^2 u_t^2`; nonnegative, zero iff every cross term vanishes.
pub fn sigma_hat_sq(residuals: &[f64], lags: &[f64], kernel: Kernel, h: Bandwidth) -> f64 {
    let (_, v, _) = pair_sums(residuals, lags, kernel, h);
    4.0 * v
}

/// Number of ordered in-support pairs; exposed for diagnostics.
pub fn pair_count(residuals: &[f64], lags: &[f64], kernel: Kernel, h: Bandwidth) -> usize {
    let (_, _, p) = pair_sums(residuals, lags, kernel, h);
    2 * p
}

/// The studentized test statistic: fit the conditional mean, then form
/// `L_T(h) = M_T(h) / sigma_hat_T(h)` from the residuals.
///
/// Kernel arguments are lag differences and the fit is computed on the
/// series centered at `X_0`, so the value is exactly translation invariant
/// whenever the shift itself is exactly representable.
pub fn l_stat(series: &Series, kernel: Kernel, h: Bandwidth) -> Result<TestOutcome> {
    l_stat_design(series.lags(), series.responses(), kernel, h)
}

/// Fixed-design variant of [`l_stat`]: regress `responses[i]` on `lags[i]`
/// for an arbitrary design, then studentize the paired-residual sum over
/// that design. `l_stat` is the special case where the design is the
/// series' own lag structure.
pub fn l_stat_design(
    lags: &[f64],
    responses: &[f64],
    kernel: Kernel,
    h: Bandwidth,
) -> Result<TestOutcome> {
    let t = lags.len();
    if t < 2 || responses.len() != t {
        return Err(Error::InvalidParameter(format!(
            "need matching lag/response arrays of length >= 2, got {t} and {}",
            responses.len()
        )));
    }
    let residuals = crate::nw::nw_residuals_design(lags, responses, kernel, h);
    let (m_half, v_quarter, unordered) = pair_sums(&residuals, lags, kernel, h);
    let m_value = 2.0 * m_half;
    let var = 4.0 * v_quarter;
    let pair_count = 2 * unordered;
    if var <= 0.0 {
        return Err(Error::DegenerateStatistic { pair_count });
    }
    let sigma_hat = var.sqrt();
    Ok(TestOutcome {
        m_value,
        sigma_hat,
        l_value: m_value / sigma_hat,
        h,
        t,
        pair_count,
    })
}

/// Diagnostic statistic `N_T(h) = (1/T) * sum_t [ghat(X_(t-1)) - Xhat_(t-1)]^2`
/// where `Xhat` is the kernel smooth of the lagged values themselves. The
/// gap equals the kernel smooth of the first differences, which is how it is
/// computed here; the triple-sum form is used as a test oracle only.
pub fn n_stat(series: &Series, kernel: Kernel, h: Bandwidth) -> f64 {
    let t = series.t();
    let lags = series.lags();
    let diffs = series.diffs();
    let sorted = sort_lags(lags);
    let hv = h.get();
    let radius = kernel.support_radius() * hv * RADIUS_GUARD;

    let mut acc = Accumulator::default();
    scan_windows(&sorted.values, radius, |j, lo, hi| {
        let xj = sorted.values[j];
        let mut num = 0.0;
        let mut den = 0.0;
        for k in lo..hi {
            let kv = kernel.evaluate((sorted.values[k] - xj) / hv);
            num += kv * diffs[sorted.perm[k] as usize];
            den += kv;
        }
        let gap = num / den;
        acc.add(gap * gap);
    });
    acc.total() / t as f64
}

/// Asymptotic variance `C10 * T^(3/2) * h` of the double-sum statistic under
/// the null, with `C10 = 16 sigma_u^4 J02 / (3 sqrt(2 pi))`.
pub fn theoretical_variance(t: usize, h: Bandwidth, sigma_u: f64, kernel: Kernel) -> f64 {
    let c10 = 16.0 * sigma_u.powi(4) * kernel.l2_norm() / (3.0 * (2.0 * std::f64::consts::PI).sqrt());
    c10 * (t as f64).powf(1.5) * h.get()
}

/// Dickey-Fuller statistic of the comparator regression `X_t - X_(t-1) =
/// beta X_(t-1) + error`:
///
/// * `beta_hat` from the regression over `t = 2..=T`,
/// * `sigma_hat^2 = (1/T) sum_(t=1..T) (X_t - X_(t-1) - beta_hat X_(t-1))^2`
///   (the `t = 1` term, which consumes `X_0`, is included as printed),
/// * `L_0 = sum (X_t - X_(t-1)) X_(t-1) / (sigma_hat sqrt(sum X_(t-1)^2))`.
///
/// Not translation invariant (the regression is through the origin), but
/// exactly scale invariant in the data.
pub fn dickey_fuller(series: &Series) -> Result<DfOutcome> {
    let values = series.values();
    let t = series.t();

    let mut num = Accumulator::default();
    let mut den = Accumulator::default();
    // Sums over t = 2..=T: regressors X_1 .. X_(T-1).
    for w in values[1..].windows(2) {
        num.add((w[1] - w[0]) * w[0]);
        den.add(w[0] * w[0]);
    }
    let num = num.total();
    let den = den.total();
    if den <= 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    let beta_hat = num / den;

    let mut rss = Accumulator::default();
    // Residual sum over t = 1..=T (includes the X_0 term).
    for w in values.windows(2) {
        let r = w[1] - w[0] - beta_hat * w[0];
        rss.add(r * r);
    }
    let sigma_sq = rss.total() / t as f64;
    if sigma_sq <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let sigma_hat = sigma_sq.sqrt();
    Ok(DfOutcome {
        beta_hat,
        sigma_hat,
        l0: num / (sigma_hat * den.sqrt()),
    })
}
