//! Nonparametric kernel test of the random-walk null `g(x) = x` in the
//! autoregression `X_t = g(X_(t-1)) + u_t`, against stationary alternatives.
//!
//! The crate provides:
//!
//! * the Nadaraya-Watson regression machinery and the studentized
//!   paired-residual statistic `L_T(h)` ([`stats`], [`nw`]);
//! * bootstrap calibration of critical values, p-values, and size/power
//!   based bandwidth selection ([`bootstrap`]);
//! * data-generating processes, CSV ingestion and reproducible parallel
//!   random streams ([`series`], [`rng`]);
//! * a Monte Carlo experiment harness with deterministic output
//!   ([`experiments`], [`output`]).
//!
//! All Monte Carlo loops draw from counter-based streams keyed by
//! `(master_seed, replication, resample)`, so results are bit-identical for
//! any worker count.

pub mod bootstrap;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod nw;
pub mod output;
pub mod rng;
pub mod series;
mod sorted;
pub mod stats;

pub use bootstrap::{
    bootstrap_distribution, bootstrap_resample, critical_value, critical_value_lower, p_value,
    select_bandwidth, select_from_curve, size_power, size_power_curve, BandwidthSelection,
    BootstrapDistribution, BootstrapSpec, CriticalValue, Innovation, PValueOutcome,
    SizePowerCurve, SizePowerPoint,
};
pub use error::{Error, Result};
pub use kernel::{admissible_window, bandwidth_ladder, Bandwidth, Kernel};
pub use nw::{cv_bandwidth, default_cv_grid, delta_hat, nw_fit, nw_weights, CvSelection, NwFit};
pub use rng::RngStream;
pub use series::{ingest_csv, sigma_u_hat, simulate, write_csv, Dgp, Series};
pub use stats::{
    dickey_fuller, l_stat, l_stat_design, m_stat, n_stat, sigma_hat_sq, theoretical_variance,
    DfOutcome, TestOutcome,
};
