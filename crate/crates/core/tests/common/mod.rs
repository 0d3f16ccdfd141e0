//! Shared naive reference implementations (oracles) and helpers for the
//! integration and acceptance suites. These deliberately mirror the formula
//! displays term by term, independent of the library's sorted-window fast
//! paths.

#![allow(dead_code)]

use rwkernel::{Bandwidth, Dgp, Kernel, RngStream, Series};

/// Double sum over ordered pairs s != t of `u_s K((lag_s - lag_t)/h) u_t`,
/// in plain index order.
pub fn naive_m_stat(residuals: &[f64], lags: &[f64], kernel: Kernel, h: f64) -> f64 {
    let n = lags.len();
    let mut total = 0.0;
    for t in 0..n {
        for s in 0..n {
            if s != t {
                total += residuals[s] * kernel.evaluate((lags[s] - lags[t]) / h) * residuals[t];
            }
        }
    }
    total
}

/// `2 * sum over ordered pairs of u_s^2 K^2 u_t^2`.
pub fn naive_sigma_hat_sq(residuals: &[f64], lags: &[f64], kernel: Kernel, h: f64) -> f64 {
    let n = lags.len();
    let mut total = 0.0;
    for t in 0..n {
        for s in 0..n {
            if s != t {
                let kv = kernel.evaluate((lags[s] - lags[t]) / h);
                total += residuals[s].powi(2) * kv * kv * residuals[t].powi(2);
            }
        }
    }
    2.0 * total
}

/// Normalized weight of lag `s` at evaluation point `x`.
fn naive_weight(x: f64, s: usize, lags: &[f64], kernel: Kernel, h: f64) -> f64 {
    let num = kernel.evaluate((lags[s] - x) / h);
    let den: f64 = lags.iter().map(|&l| kernel.evaluate((l - x) / h)).sum();
    num / den
}

/// Triple-sum diagnostic: `sum_(s,t) A(lag_t, lag_s) u_t u_s` with
/// `A(a, b) = (1/T) sum_k W(lag_k; a) W(lag_k; b)` and `u_t` the first
/// differences. O(T^3).
pub fn naive_n_stat(series: &Series, kernel: Kernel, h: f64) -> f64 {
    let lags = series.lags();
    let diffs = series.diffs();
    let n = lags.len();
    let mut total = 0.0;
    for t in 0..n {
        for s in 0..n {
            let mut a = 0.0;
            for k in 0..n {
                a += naive_weight(lags[k], t, lags, kernel, h)
                    * naive_weight(lags[k], s, lags, kernel, h);
            }
            total += a / n as f64 * diffs[t] * diffs[s];
        }
    }
    total
}

/// Naive residuals of the regression of responses on lags.
pub fn naive_residuals(lags: &[f64], responses: &[f64], kernel: Kernel, h: f64) -> Vec<f64> {
    let n = lags.len();
    (0..n)
        .map(|t| {
            let mut num = 0.0;
            let mut den = 0.0;
            for s in 0..n {
                let kv = kernel.evaluate((lags[s] - lags[t]) / h);
                num += kv * responses[s];
                den += kv;
            }
            responses[t] - num / den
        })
        .collect()
}

pub fn random_walk(t: usize, sigma_u: f64, stream: &RngStream) -> Series {
    rwkernel::simulate(&Dgp::RandomWalk { sigma_u }, t, stream).unwrap()
}

pub fn bw(h: f64) -> Bandwidth {
    Bandwidth::new(h).unwrap()
}

/// Relative gap |a - b| / max(|a|, |b|, floor).
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
