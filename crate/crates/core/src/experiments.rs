//! Batch experiment runner: power and size tables over the bandwidth ladder
//! with a Dickey-Fuller comparator column, and the real-data test pipeline.

use crate::bootstrap::{
    critical_value_lower, mc_rejections, proportion_above, proportion_below, select_bandwidth,
    BandwidthSelection, BootstrapSpec, Innovation,
};
use crate::error::{Error, Result};
use crate::kernel::{admissible_window, bandwidth_ladder, Bandwidth, Kernel, DEFAULT_EPS0};
use crate::rng::RngStream;
use crate::series::{sigma_u_hat, Dgp, Series};
use crate::stats::{dickey_fuller, l_stat, DfOutcome, TestOutcome};
use serde::{Deserialize, Serialize};

/// Alternative family used by the simulation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AltFamily {
    /// `X_t = X_(t-1) + beta X_(t-1) + u_t`.
    Linear,
    /// `X_t = X_(t-1) + beta X_(t-1) + beta / (1 + |X_(t-1)|^gamma) + u_t`.
    Nonlinear,
}

impl AltFamily {
    pub fn dgp(self, beta: f64, gamma: f64, sigma_u: f64) -> Dgp {
        match self {
            AltFamily::Linear => Dgp::LinearShift { beta, sigma_u },
            AltFamily::Nonlinear => Dgp::NonlinearShift {
                beta,
                gamma,
                sigma_u,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AltFamily::Linear => "linear",
            AltFamily::Nonlinear => "nonlinear",
        }
    }
}

/// How the Dickey-Fuller comparator column is calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DfCalibration {
    /// Left-tail critical value from the same bootstrap resamples as the
    /// kernel statistics (default: like-for-like comparison).
    Bootstrap,
    /// Asymptotic no-constant Dickey-Fuller critical value; only the 1%, 5%
    /// and 10% levels are tabulated.
    Asymptotic,
}

/// Asymptotic 1%/5%/10% critical values of the no-constant Dickey-Fuller
/// t-statistic.
pub fn df_asymptotic_critical(alpha: f64) -> Result<f64> {
    // Standard tau table (no constant, no trend), large-T column.
    let table = [(0.01, -2.58), (0.05, -1.95), (0.10, -1.62)];
    for (a, cv) in table {
        if (alpha - a).abs() < 1e-9 {
            return Ok(cv);
        }
    }
    Err(Error::InvalidParameter(format!(
        "asymptotic Dickey-Fuller critical values are tabulated only for \
         alpha in {{0.01, 0.05, 0.10}}, got {alpha}"
    )))
}

/// Experiment configuration shared by the table runners.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub t_values: Vec<usize>,
    pub beta_values: Vec<f64>,
    pub gamma: f64,
    pub sigma_u_sq: f64,
    /// Per-T overrides of the test bandwidth; `(T, h_test)` pairs.
    pub h_test_overrides: Vec<(usize, f64)>,
    pub kernel: Kernel,
    pub spec: BootstrapSpec,
    pub df_calibration: DfCalibration,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            t_values: vec![250, 500, 750],
            beta_values: vec![-0.05, -0.10, -0.20, -0.40],
            gamma: 0.5,
            sigma_u_sq: 0.05,
            h_test_overrides: Vec::new(),
            kernel: Kernel::Uniform,
            spec: BootstrapSpec::default(),
            df_calibration: DfCalibration::Bootstrap,
        }
    }
}

impl ExperimentConfig {
    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u_sq.sqrt()
    }

    /// Test bandwidth for a sample size: an override if present, the
    /// reference values for T in {250, 500, 750}, otherwise `T^(-0.35)`
    /// (the midpoint rate of the admissible window, which interpolates the
    /// reference values to within a few percent).
    pub fn h_test(&self, t: usize) -> f64 {
        if let Some(&(_, h)) = self.h_test_overrides.iter().find(|&&(tv, _)| tv == t) {
            return h;
        }
        match t {
            250 => 0.160,
            500 => 0.117,
            750 => 0.097,
            _ => (t as f64).powf(-0.35),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::Config("no T values configured".into()));
        }
        if self.beta_values.is_empty() {
            return Err(Error::Config("no beta values configured".into()));
        }
        for &t in &self.t_values {
            if t < 2 {
                return Err(Error::Config(format!("T must be >= 2, got {t}")));
            }
        }
        if !(self.sigma_u_sq > 0.0) {
            return Err(Error::Config(format!(
                "sigma_u^2 must be positive, got {}",
                self.sigma_u_sq
            )));
        }
        self.spec.validate()?;
        if self.df_calibration == DfCalibration::Asymptotic {
            df_asymptotic_critical(self.spec.alpha)?;
        }
        Ok(())
    }

    /// Bandwidths outside the admissible window, reported as warnings.
    pub fn window_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &t in &self.t_values {
            if let Ok((lo, hi)) = admissible_window(t, DEFAULT_EPS0) {
                let h = self.h_test(t);
                if h < lo || h > hi {
                    out.push(format!(
                        "h_test = {h} for T = {t} lies outside the admissible window \
                         [{lo:.4}, {hi:.4}]"
                    ));
                }
            }
        }
        out
    }
}

/// One row of a power or size table: rejection frequencies for the five
/// ladder statistics and the Dickey-Fuller comparator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    /// Drift coefficient (0 for size rows).
    pub beta: f64,
    /// Rejection frequency of `L_1 .. L_5`.
    pub l: [f64; 5],
    /// Rejection frequency of the comparator.
    pub l0: f64,
    pub se_l: [f64; 5],
    pub se_l0: f64,
    pub degenerate: usize,
}

/// Power (or size) table for one sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerTable {
    #[serde(rename = "T")]
    pub t: usize,
    pub h_test: f64,
    pub ladder: [f64; 5],
    pub alpha: f64,
    pub m: usize,
    pub b: usize,
    pub seed: u64,
    pub kernel: Kernel,
    pub alternative: String,
    pub df_calibration: DfCalibration,
    pub rows: Vec<TableRow>,
}

fn run_table_rows(
    config: &ExperimentConfig,
    t: usize,
    dgps: &[(f64, Dgp)],
    stream_tag: u64,
) -> Result<PowerTable> {
    let h_test = config.h_test(t);
    let ladder = bandwidth_ladder(Bandwidth::new(h_test)?);
    let root = RngStream::new(config.spec.master_seed).child(stream_tag).child(t as u64);

    let mut rows = Vec::with_capacity(dgps.len());
    for (row_idx, (beta, dgp)) in dgps.iter().enumerate() {
        let run = mc_rejections(
            dgp,
            t,
            config.kernel,
            &ladder,
            &config.spec,
            &root.child(row_idx as u64),
            true,
        )?;
        let df_cell = run.df.as_ref().expect("df requested");
        let mut l = [0.0; 5];
        let mut se_l = [0.0; 5];
        let mut degenerate = 0;
        for (i, cell) in run.per_h.iter().enumerate() {
            l[i] = cell.frequency();
            se_l[i] = cell.stderr();
            degenerate += cell.degenerate;
        }
        rows.push(TableRow {
            beta: *beta,
            l,
            l0: df_cell.frequency(),
            se_l,
            se_l0: df_cell.stderr(),
            degenerate: degenerate + df_cell.degenerate,
        });
    }

    Ok(PowerTable {
        t,
        h_test,
        ladder: ladder.map(|b| b.get()),
        alpha: config.spec.alpha,
        m: config.spec.m,
        b: config.spec.b,
        seed: config.spec.master_seed,
        kernel: config.kernel,
        alternative: String::new(),
        df_calibration: config.df_calibration,
        rows,
    })
}

/// Estimate the power table for every configured sample size: for each
/// `beta` and each ladder bandwidth, the rejection frequency over `M`
/// alternative paths, each calibrated by its own `B`-resample bootstrap.
pub fn run_power_table(config: &ExperimentConfig, alt: AltFamily) -> Result<Vec<PowerTable>> {
    config.validate()?;
    if config.df_calibration == DfCalibration::Asymptotic {
        return run_power_table_asymptotic_df(config, alt);
    }
    let sigma_u = config.sigma_u();
    config
        .t_values
        .iter()
        .map(|&t| {
            let dgps: Vec<(f64, Dgp)> = config
                .beta_values
                .iter()
                .map(|&beta| (beta, alt.dgp(beta, config.gamma, sigma_u)))
                .collect();
            let mut table = run_table_rows(config, t, &dgps, 1)?;
            table.alternative = alt.name().to_string();
            Ok(table)
        })
        .collect()
}

/// Estimate the size table: one row per sample size under the null.
pub fn run_size_table(config: &ExperimentConfig) -> Result<Vec<PowerTable>> {
    config.validate()?;
    let sigma_u = config.sigma_u();
    config
        .t_values
        .iter()
        .map(|&t| {
            let dgps = vec![(0.0, Dgp::RandomWalk { sigma_u })];
            let mut table = run_table_rows(config, t, &dgps, 2)?;
            table.alternative = "null".to_string();
            Ok(table)
        })
        .collect()
}

/// Power table with the comparator judged against the asymptotic
/// Dickey-Fuller critical value instead of the bootstrap.
fn run_power_table_asymptotic_df(
    config: &ExperimentConfig,
    alt: AltFamily,
) -> Result<Vec<PowerTable>> {
    let cv = df_asymptotic_critical(config.spec.alpha)?;
    let sigma_u = config.sigma_u();
    let mut tables = run_power_table(
        &ExperimentConfig {
            df_calibration: DfCalibration::Bootstrap,
            ..config.clone()
        },
        alt,
    )?;
    // Recompute only the comparator column with the fixed critical value.
    for table in &mut tables {
        let root = RngStream::new(config.spec.master_seed)
            .child(1)
            .child(table.t as u64);
        for (row_idx, row) in table.rows.iter_mut().enumerate() {
            let dgp = alt.dgp(row.beta, config.gamma, sigma_u);
            let mut rejections = 0usize;
            let mut usable = 0usize;
            for m in 0..config.spec.m {
                let stream = root.child(row_idx as u64).child(m as u64).child(0);
                let data = crate::series::simulate(&dgp, table.t, &stream)?;
                match dickey_fuller(&data) {
                    Ok(out) => {
                        usable += 1;
                        if out.l0 <= cv {
                            rejections += 1;
                        }
                    }
                    Err(Error::DegenerateRegressor) | Err(Error::DegenerateVariance) => {}
                    Err(e) => return Err(e),
                }
            }
            row.l0 = rejections as f64 / usable.max(1) as f64;
            row.se_l0 = (row.l0 * (1.0 - row.l0) / usable.max(1) as f64).sqrt();
        }
        table.df_calibration = DfCalibration::Asymptotic;
    }
    Ok(tables)
}

/// Options for the real-data pipeline.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub kernel: Kernel,
    /// Fixed test bandwidth; when absent the bandwidth is calibrated by
    /// size/power selection against the fitted alternative.
    pub h: Option<f64>,
    /// Calibration grid; `None` selects a default grid inside the
    /// admissible window.
    pub grid: Option<Vec<f64>>,
    /// Alternative used for calibration when `h` is not fixed. `None` fits
    /// a linear alternative with `beta` from the Dickey-Fuller regression.
    pub calibration_alt: Option<Dgp>,
    pub spec: BootstrapSpec,
    pub df_calibration: DfCalibration,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            kernel: Kernel::Uniform,
            h: None,
            grid: None,
            calibration_alt: None,
            spec: BootstrapSpec::default(),
            df_calibration: DfCalibration::Bootstrap,
        }
    }
}

/// JSON-serializable report of one data analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    #[serde(rename = "T")]
    pub t: usize,
    pub kernel: Kernel,
    pub sigma_u_hat: f64,
    pub h: f64,
    pub h_source: String,
    pub alpha: f64,
    pub b: usize,
    pub seed: u64,
    pub innovation: Innovation,
    pub l_test: TestOutcome,
    pub l_p_value: f64,
    pub dickey_fuller: DfOutcome,
    pub l0_p_value: f64,
    pub l0_critical: f64,
    pub df_calibration: DfCalibration,
    pub degenerate_resamples: usize,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<BandwidthSelection>,
}

/// Run the full test pipeline on an ingested series: estimate `sigma_u`,
/// fix or calibrate the bandwidth, compute the kernel statistic and the
/// comparator with bootstrap p-values.
pub fn run_data_analysis(series: &Series, input_name: &str, opts: &AnalysisOptions) -> Result<Report> {
    opts.spec.validate()?;
    let t = series.t();
    let sigma = sigma_u_hat(series);
    let mut warnings = Vec::new();

    let df = dickey_fuller(series)?;

    let (h, h_source, calibration) = match opts.h {
        Some(h) => (h, "fixed".to_string(), None),
        None => {
            let grid: Vec<f64> = match &opts.grid {
                Some(g) => g.clone(),
                None => default_calibration_grid(t)?,
            };
            let grid: Vec<Bandwidth> = grid
                .into_iter()
                .map(Bandwidth::new)
                .collect::<Result<_>>()?;
            let null = Dgp::RandomWalk { sigma_u: sigma };
            let alt = match &opts.calibration_alt {
                Some(dgp) => dgp.clone(),
                None => Dgp::LinearShift {
                    beta: df.beta_hat.min(-1e-4),
                    sigma_u: sigma,
                },
            };
            if let Some(w) = alt.stationarity_warning() {
                warnings.push(w);
            }
            let selection = select_bandwidth(&null, &alt, t, opts.kernel, &grid, &opts.spec)?;
            (
                selection.h_test.get(),
                "calibrated".to_string(),
                Some(selection),
            )
        }
    };

    if let Ok((lo, hi)) = admissible_window(t, DEFAULT_EPS0) {
        if h < lo || h > hi {
            warnings.push(format!(
                "h = {h} lies outside the admissible window [{lo:.4}, {hi:.4}] for T = {t}"
            ));
        }
    }

    let hb = Bandwidth::new(h)?;
    let observed = l_stat(series, opts.kernel, hb)?;

    // Bootstrap both statistics from the same resamples.
    let root = RngStream::new(opts.spec.master_seed).child(4);
    let sigma_boot = sigma;
    if sigma_boot <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let law = crate::bootstrap::InnovationLaw::prepare(opts.spec.innovation, series)?;
    let mut l_values = Vec::with_capacity(opts.spec.b);
    let mut l0_values = Vec::with_capacity(opts.spec.b);
    let mut degenerate = 0usize;
    for bi in 0..opts.spec.b {
        let path = crate::bootstrap::resample_with(
            series,
            sigma_boot,
            &law,
            opts.spec.literal_recursion,
            &root.child(bi as u64),
        )?;
        match l_stat(&path, opts.kernel, hb) {
            Ok(out) => l_values.push(out.l_value),
            Err(Error::DegenerateStatistic { .. }) => degenerate += 1,
            Err(e) => return Err(e),
        }
        match dickey_fuller(&path) {
            Ok(out) => l0_values.push(out.l0),
            Err(Error::DegenerateRegressor) | Err(Error::DegenerateVariance) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    if l_values.is_empty() || degenerate * 5 > 2 * opts.spec.b {
        return Err(Error::BandwidthTooSmall {
            degenerate,
            total: 2 * opts.spec.b,
        });
    }
    l_values.sort_by(f64::total_cmp);
    l0_values.sort_by(f64::total_cmp);

    let l_p = proportion_above(&l_values, observed.l_value);
    let l0_p = proportion_below(&l0_values, df.l0);
    let l0_critical = match opts.df_calibration {
        DfCalibration::Bootstrap => critical_value_lower(&l0_values, opts.spec.alpha)?,
        DfCalibration::Asymptotic => df_asymptotic_critical(opts.spec.alpha)?,
    };

    Ok(Report {
        input: input_name.to_string(),
        t,
        kernel: opts.kernel,
        sigma_u_hat: sigma,
        h,
        h_source,
        alpha: opts.spec.alpha,
        b: opts.spec.b,
        seed: opts.spec.master_seed,
        innovation: opts.spec.innovation,
        l_test: observed,
        l_p_value: l_p,
        dickey_fuller: df,
        l0_p_value: l0_p,
        l0_critical,
        df_calibration: opts.df_calibration,
        degenerate_resamples: degenerate,
        warnings,
        calibration,
    })
}

/// Default grid for real-data calibration: five log-spaced bandwidths
/// across the admissible window.
pub fn default_calibration_grid(t: usize) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_window(t, DEFAULT_EPS0)?;
    let n = 5;
    Ok((0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect())
}
