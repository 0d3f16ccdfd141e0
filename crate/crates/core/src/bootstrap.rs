//! Bootstrap calibration: null resampling, simulated critical values,
//! p-values, size/power estimation and power-maximizing bandwidth selection.

use crate::error::{Error, Result};
use crate::kernel::{Bandwidth, Kernel};
use crate::rng::RngStream;
use crate::series::{sigma_u_hat, Dgp, Series};
use crate::stats::{dickey_fuller, l_stat, TestOutcome};
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Law of the bootstrap innovations `eps*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Innovation {
    /// Parametric bootstrap: `eps* ~ N(0, 1)`.
    StandardNormal,
    /// Nonparametric bootstrap: i.i.d. draws from the centered, unit-scaled
    /// observed first differences.
    ResampledDifferences,
}

impl Innovation {
    pub fn name(self) -> &'static str {
        match self {
            Innovation::StandardNormal => "standard-normal",
            Innovation::ResampledDifferences => "resampled-differences",
        }
    }
}

/// Replication counts and conventions for a bootstrap run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSpec {
    /// Bootstrap resamples per test.
    pub b: usize,
    /// Monte Carlo replications for size/power estimation.
    pub m: usize,
    /// Nominal level.
    pub alpha: f64,
    pub innovation: Innovation,
    pub master_seed: u64,
    /// Use the literal resampling recursion `X*_t = X_(t-1) + sigma eps*`
    /// (anchored to the original path) instead of the default recursion on
    /// the resampled path. Provided for comparison only.
    pub literal_recursion: bool,
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.b < 20 {
            return Err(Error::InvalidParameter(format!(
                "need at least 20 bootstrap resamples for quantile estimation, got {}",
                self.b
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("need at least 1 replication".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        BootstrapSpec {
            b: 99,
            m: 200,
            alpha: 0.05,
            innovation: Innovation::StandardNormal,
            master_seed: 0,
            literal_recursion: false,
        }
    }
}

/// Prepared innovation sampler for one observed series.
#[derive(Debug, Clone)]
pub(crate) enum InnovationLaw {
    Normal,
    /// Centered, unit-variance rescaling of the observed first differences.
    Empirical(Vec<f64>),
}

impl InnovationLaw {
    pub(crate) fn prepare(innovation: Innovation, series: &Series) -> Result<Self> {
        match innovation {
            Innovation::StandardNormal => Ok(InnovationLaw::Normal),
            Innovation::ResampledDifferences => {
                let diffs = series.diffs();
                let n = diffs.len() as f64;
                let mean = diffs.iter().sum::<f64>() / n;
                let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
                if var <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "cannot resample differences: observed increments are constant".into(),
                    ));
                }
                let sd = var.sqrt();
                Ok(InnovationLaw::Empirical(
                    diffs.iter().map(|d| (d - mean) / sd).collect(),
                ))
            }
        }
    }

    pub(crate) fn draw(&self, stream: &RngStream, n: usize) -> Vec<f64> {
        match self {
            InnovationLaw::Normal => stream.standard_normals(n),
            InnovationLaw::Empirical(pool) => {
                let mut rng = stream.rng();
                (0..n).map(|_| pool[rng.random_range(0..pool.len())]).collect()
            }
        }
    }
}

/// One null resample path: `X*_0 = X_0`, then the random-walk recursion with
/// innovation scale `sigma_u_hat`. With `literal_recursion` the drawn
/// increment is added to the original path's lag instead of the resampled
/// one, which reproduces the printed form of the scheme.
pub fn bootstrap_resample(
    series: &Series,
    sigma_u_hat: f64,
    innovation: Innovation,
    stream: &RngStream,
) -> Result<Series> {
    let law = InnovationLaw::prepare(innovation, series)?;
    resample_with(series, sigma_u_hat, &law, false, stream)
}

pub(crate) fn resample_with(
    series: &Series,
    sigma: f64,
    law: &InnovationLaw,
    literal_recursion: bool,
    stream: &RngStream,
) -> Result<Series> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma_u_hat must be positive and finite, got {sigma}"
        )));
    }
    let t = series.t();
    let eps = law.draw(stream, t);
    let mut values = Vec::with_capacity(t + 1);
    values.push(series.first());
    if literal_recursion {
        for (k, e) in eps.iter().enumerate() {
            values.push(series.values()[k] + sigma * e);
        }
    } else {
        let mut x = series.first();
        for e in &eps {
            x += sigma * e;
            values.push(x);
        }
    }
    Series::new(values)
}

/// Sorted bootstrap distribution of the studentized statistic under the
/// resampling null, with degenerate resamples dropped and counted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    /// Non-degenerate statistic values, ascending.
    pub values: Vec<f64>,
    pub degenerate: usize,
    pub h: Bandwidth,
}

/// Critical value extracted from a bootstrap distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub l_star: f64,
    pub h: Bandwidth,
    pub alpha: f64,
    pub b: usize,
}

impl BootstrapDistribution {
    pub fn critical_value(&self, alpha: f64) -> Result<CriticalValue> {
        Ok(CriticalValue {
            l_star: critical_value(&self.values, alpha)?,
            h: self.h,
            alpha,
            b: self.values.len(),
        })
    }
}

/// Generate the bootstrap distribution of `L*_T(h)` from `b` resamples.
/// Fails if more than 20% of resamples produce a degenerate statistic.
pub fn bootstrap_distribution(
    series: &Series,
    kernel: Kernel,
    h: Bandwidth,
    b: usize,
    innovation: Innovation,
    stream: &RngStream,
) -> Result<BootstrapDistribution> {
    if b < 20 {
        return Err(Error::InvalidParameter(format!(
            "need at least 20 bootstrap resamples, got {b}"
        )));
    }
    let sigma = sigma_u_hat(series);
    if sigma <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let law = InnovationLaw::prepare(innovation, series)?;

    let outcomes: Vec<Result<Option<f64>>> = (0..b)
        .into_par_iter()
        .map(|bi| {
            let path = resample_with(series, sigma, &law, false, &stream.child(bi as u64))?;
            match l_stat(&path, kernel, h) {
                Ok(out) => Ok(Some(out.l_value)),
                Err(Error::DegenerateStatistic { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut values = Vec::with_capacity(b);
    let mut degenerate = 0usize;
    for outcome in outcomes {
        match outcome? {
            Some(v) => values.push(v),
            None => degenerate += 1,
        }
    }
    if degenerate * 5 > b {
        return Err(Error::BandwidthTooSmall {
            degenerate,
            total: b,
        });
    }
    values.sort_by(f64::total_cmp);
    Ok(BootstrapDistribution {
        values,
        degenerate,
        h,
    })
}

/// Upper-tail critical value: the k-th smallest of the sorted distribution
/// with `k = ceil((1 - alpha) * B)`, so the proportion strictly above it is
/// at most `alpha`.
pub fn critical_value(sorted: &[f64], alpha: f64) -> Result<f64> {
    let k = quantile_rank(sorted.len(), alpha)?;
    Ok(sorted[k - 1])
}

/// Lower-tail mirror used for left-tailed comparators: the `(B + 1 - k)`-th
/// smallest value, so the proportion strictly below is at most `alpha`.
pub fn critical_value_lower(sorted: &[f64], alpha: f64) -> Result<f64> {
    let b = sorted.len();
    let k = quantile_rank(b, alpha)?;
    Ok(sorted[b - k])
}

/// `k = ceil((1 - alpha) * B)` computed with a snap-to-integer guard so that
/// exactly representable products (e.g. alpha = 0.25, B = 4) never round to
/// the wrong order statistic.
fn quantile_rank(b: usize, alpha: f64) -> Result<usize> {
    if b == 0 {
        return Err(Error::InvalidParameter(
            "empty bootstrap distribution".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let target = (1.0 - alpha) * b as f64;
    let snapped = target.round();
    let k = if (target - snapped).abs() <= 1e-8 * target.max(1.0) {
        snapped as usize
    } else {
        target.ceil() as usize
    };
    Ok(k.clamp(1, b))
}

/// Bootstrap p-value of the observed statistic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PValueOutcome {
    /// Proportion of non-degenerate resamples with `L* > L_observed`.
    pub p: f64,
    pub observed: TestOutcome,
    pub degenerate: usize,
    pub b_used: usize,
}

/// Approximate p-value: the proportion of bootstrap statistics strictly
/// above the observed one. A degenerate observed statistic propagates.
pub fn p_value(
    series: &Series,
    kernel: Kernel,
    h: Bandwidth,
    b: usize,
    innovation: Innovation,
    stream: &RngStream,
) -> Result<PValueOutcome> {
    let observed = l_stat(series, kernel, h)?;
    let dist = bootstrap_distribution(series, kernel, h, b, innovation, stream)?;
    Ok(PValueOutcome {
        p: proportion_above(&dist.values, observed.l_value),
        observed,
        degenerate: dist.degenerate,
        b_used: dist.values.len(),
    })
}

pub(crate) fn proportion_above(sorted: &[f64], observed: f64) -> f64 {
    let above = sorted.partition_point(|v| *v <= observed);
    (sorted.len() - above) as f64 / sorted.len() as f64
}

pub(crate) fn proportion_below(sorted: &[f64], observed: f64) -> f64 {
    let below = sorted.partition_point(|v| *v < observed);
    below as f64 / sorted.len() as f64
}

/// Size/power estimates for one bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizePowerPoint {
    pub h: Bandwidth,
    pub size: f64,
    pub power: f64,
    pub se_size: f64,
    pub se_power: f64,
    /// Degenerate statistic evaluations encountered across both runs.
    pub degenerate: usize,
}

/// Per-bandwidth size and power curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizePowerCurve {
    pub rows: Vec<SizePowerPoint>,
    pub alpha: f64,
}

impl SizePowerCurve {
    /// Bandwidths whose estimated size does not exceed the nominal level.
    pub fn admissible(&self) -> Vec<&SizePowerPoint> {
        self.rows.iter().filter(|r| r.size <= self.alpha).collect()
    }
}

/// Aggregated rejection counts for one statistic under one hypothesis.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CellCounts {
    pub rejections: usize,
    pub usable: usize,
    pub degenerate: usize,
    pub evaluations: usize,
}

impl CellCounts {
    pub fn frequency(&self) -> f64 {
        self.rejections as f64 / self.usable.max(1) as f64
    }

    pub fn stderr(&self) -> f64 {
        binomial_se(self.frequency(), self.usable)
    }
}

/// One hypothesis run across a bandwidth grid, with an optional
/// Dickey-Fuller column calibrated from the same resamples.
#[derive(Debug, Clone)]
pub(crate) struct McRun {
    pub per_h: Vec<CellCounts>,
    pub df: Option<CellCounts>,
}

/// Per-replication outcome: rejection/usability flags per bandwidth plus the
/// optional Dickey-Fuller pair, and degenerate evaluation counts.
struct RepOutcome {
    rejected: Vec<bool>,
    ok: Vec<bool>,
    degenerate: Vec<usize>,
    df_rejected: bool,
    df_ok: bool,
    df_degenerate: usize,
}

/// Core Monte Carlo loop: for every replication simulate a path from `dgp`,
/// bootstrap its own critical value at each bandwidth with `spec.b`
/// resamples, and record rejections of `L >= l*`. The optional Dickey-Fuller
/// comparator is left-tailed: it rejects when `L0 <= l0*` at the mirrored
/// order statistic. Streams derive from `(base, replication, resample)`, so
/// scheduling cannot affect any count.
pub(crate) fn mc_rejections(
    dgp: &Dgp,
    t: usize,
    kernel: Kernel,
    hs: &[Bandwidth],
    spec: &BootstrapSpec,
    base: &RngStream,
    with_df: bool,
) -> Result<McRun> {
    let replications: Vec<Result<RepOutcome>> = (0..spec.m)
        .into_par_iter()
        .map(|m| {
            let rep = base.child(m as u64);
            let data = crate::series::simulate(dgp, t, &rep.child(0))?;
            replication_rejections(&data, kernel, hs, spec, &rep, with_df)
        })
        .collect();

    let mut per_h = vec![CellCounts::default(); hs.len()];
    let mut df = CellCounts::default();
    for rep in replications {
        let rep = rep?;
        for (i, cell) in per_h.iter_mut().enumerate() {
            cell.evaluations += spec.b + 1;
            cell.degenerate += rep.degenerate[i];
            if rep.ok[i] {
                cell.usable += 1;
                if rep.rejected[i] {
                    cell.rejections += 1;
                }
            }
        }
        df.evaluations += spec.b + 1;
        df.degenerate += rep.df_degenerate;
        if rep.df_ok {
            df.usable += 1;
            if rep.df_rejected {
                df.rejections += 1;
            }
        }
    }
    for cell in &per_h {
        if cell.degenerate * 5 > cell.evaluations {
            return Err(Error::BandwidthTooSmall {
                degenerate: cell.degenerate,
                total: cell.evaluations,
            });
        }
    }
    Ok(McRun {
        per_h,
        df: with_df.then_some(df),
    })
}

/// Rejection indicators for one dataset across a bandwidth grid, sharing the
/// `spec.b` resample paths between bandwidths (and the comparator).
fn replication_rejections(
    data: &Series,
    kernel: Kernel,
    hs: &[Bandwidth],
    spec: &BootstrapSpec,
    rep_stream: &RngStream,
    with_df: bool,
) -> Result<RepOutcome> {
    let mut degenerate = vec![0usize; hs.len()];
    let mut df_degenerate = 0usize;

    let mut observed: Vec<Option<f64>> = Vec::with_capacity(hs.len());
    for (i, &h) in hs.iter().enumerate() {
        match l_stat(data, kernel, h) {
            Ok(out) => observed.push(Some(out.l_value)),
            Err(Error::DegenerateStatistic { .. }) => {
                observed.push(None);
                degenerate[i] += 1;
            }
            Err(e) => return Err(e),
        }
    }
    let df_observed = if with_df {
        match dickey_fuller(data) {
            Ok(out) => Some(out.l0),
            Err(Error::DegenerateRegressor) | Err(Error::DegenerateVariance) => {
                df_degenerate += 1;
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let sigma = sigma_u_hat(data);
    if sigma <= 0.0 {
        // Constant path: every statistic on it was already degenerate.
        return Ok(RepOutcome {
            rejected: vec![false; hs.len()],
            ok: vec![false; hs.len()],
            degenerate,
            df_rejected: false,
            df_ok: false,
            df_degenerate,
        });
    }
    let law = InnovationLaw::prepare(spec.innovation, data)?;

    let mut boot: Vec<Vec<f64>> = vec![Vec::with_capacity(spec.b); hs.len()];
    let mut df_boot: Vec<f64> = Vec::with_capacity(if with_df { spec.b } else { 0 });
    for bi in 0..spec.b {
        let path = resample_with(
            data,
            sigma,
            &law,
            spec.literal_recursion,
            &rep_stream.child(bi as u64 + 1),
        )?;
        for (i, &h) in hs.iter().enumerate() {
            match l_stat(&path, kernel, h) {
                Ok(out) => boot[i].push(out.l_value),
                Err(Error::DegenerateStatistic { .. }) => degenerate[i] += 1,
                Err(e) => return Err(e),
            }
        }
        if with_df {
            match dickey_fuller(&path) {
                Ok(out) => df_boot.push(out.l0),
                Err(Error::DegenerateRegressor) | Err(Error::DegenerateVariance) => {
                    df_degenerate += 1
                }
                Err(e) => return Err(e),
            }
        }
    }

    let mut rejected = vec![false; hs.len()];
    let mut ok = vec![false; hs.len()];
    for i in 0..hs.len() {
        if let Some(l_obs) = observed[i] {
            if !boot[i].is_empty() {
                boot[i].sort_by(f64::total_cmp);
                let l_star = critical_value(&boot[i], spec.alpha)?;
                ok[i] = true;
                rejected[i] = l_obs >= l_star;
            }
        }
    }
    let mut df_rejected = false;
    let mut df_ok = false;
    if let Some(l0_obs) = df_observed {
        if !df_boot.is_empty() {
            df_boot.sort_by(f64::total_cmp);
            let l0_star = critical_value_lower(&df_boot, spec.alpha)?;
            df_ok = true;
            df_rejected = l0_obs <= l0_star;
        }
    }
    Ok(RepOutcome {
        rejected,
        ok,
        degenerate,
        df_rejected,
        df_ok,
        df_degenerate,
    })
}

fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Estimate size and power of the test at one bandwidth via the full
/// `M x B` double loop: `M` null paths and `M` alternative paths, each with
/// its own bootstrap critical value.
pub fn size_power(
    null_dgp: &Dgp,
    alt_dgp: &Dgp,
    t: usize,
    kernel: Kernel,
    h: Bandwidth,
    spec: &BootstrapSpec,
) -> Result<SizePowerPoint> {
    let curve = size_power_curve(null_dgp, alt_dgp, t, kernel, &[h], spec)?;
    Ok(curve.rows[0])
}

/// Size and power across a bandwidth grid, sharing the simulated paths and
/// resamples between bandwidths (one statistic per bandwidth per path).
pub fn size_power_curve(
    null_dgp: &Dgp,
    alt_dgp: &Dgp,
    t: usize,
    kernel: Kernel,
    hs: &[Bandwidth],
    spec: &BootstrapSpec,
) -> Result<SizePowerCurve> {
    if hs.is_empty() {
        return Err(Error::InvalidParameter("empty bandwidth grid".into()));
    }
    spec.validate()?;
    null_dgp.validate()?;
    alt_dgp.validate()?;
    let root = RngStream::new(spec.master_seed);
    let null_run = mc_rejections(null_dgp, t, kernel, hs, spec, &root.child(0), false)?;
    let alt_run = mc_rejections(alt_dgp, t, kernel, hs, spec, &root.child(1), false)?;

    let rows = hs
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let null_cell = &null_run.per_h[i];
            let alt_cell = &alt_run.per_h[i];
            SizePowerPoint {
                h,
                size: null_cell.frequency(),
                power: alt_cell.frequency(),
                se_size: null_cell.stderr(),
                se_power: alt_cell.stderr(),
                degenerate: null_cell.degenerate + alt_cell.degenerate,
            }
        })
        .collect();

    Ok(SizePowerCurve {
        rows,
        alpha: spec.alpha,
    })
}

/// Selected bandwidth plus the curve it was selected from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandwidthSelection {
    pub h_test: Bandwidth,
    pub curve: SizePowerCurve,
}

/// Pick the power-maximizing bandwidth from an estimated curve, restricted
/// to the size-controlled set `{h : size(h) <= alpha}`. Ties break to the
/// largest admissible bandwidth. `None` when the admissible set is empty.
pub fn select_from_curve(curve: &SizePowerCurve) -> Option<Bandwidth> {
    curve
        .rows
        .iter()
        .filter(|r| r.size <= curve.alpha)
        .max_by(|a, b| {
            a.power
                .total_cmp(&b.power)
                .then(a.h.get().total_cmp(&b.h.get()))
        })
        .map(|r| r.h)
}

/// Power-maximizing bandwidth over the size-controlled set
/// `{h : size(h) <= alpha}`; ties break to the largest admissible h.
pub fn select_bandwidth(
    null_dgp: &Dgp,
    alt_dgp: &Dgp,
    t: usize,
    kernel: Kernel,
    h_grid: &[Bandwidth],
    spec: &BootstrapSpec,
) -> Result<BandwidthSelection> {
    let curve = size_power_curve(null_dgp, alt_dgp, t, kernel, h_grid, spec)?;
    match select_from_curve(&curve) {
        Some(h_test) => Ok(BandwidthSelection { h_test, curve }),
        None => Err(Error::NoAdmissibleBandwidth {
            curve: Box::new(curve),
        }),
    }
}
