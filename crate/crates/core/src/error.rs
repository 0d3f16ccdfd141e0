use crate::bootstrap::SizePowerCurve;
use thiserror::Error;

/// Errors produced by the library. The CLI maps these onto its exit-code
/// contract: 2 degenerate statistic, 3 no admissible bandwidth, 4 I/O or
/// unusable input data, 5 configuration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series too short: need at least 3 observations, got {got}")]
    TooShort { got: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("simulated path became non-finite at step {index} (explosive drift?)")]
    Explosion { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no kernel support at x = {x}: every lagged observation is farther than c1*h")]
    NoSupport { x: f64 },

    #[error(
        "degenerate statistic: sigma_hat = 0 with {pair_count} in-support pairs \
         (bandwidth too small or residuals identically zero)"
    )]
    DegenerateStatistic { pair_count: usize },

    #[error("degenerate regressor: sum of squared lagged values is zero")]
    DegenerateRegressor,

    #[error("degenerate variance: regression residuals are identically zero")]
    DegenerateVariance,

    #[error("bandwidth too small: {degenerate} of {total} evaluations degenerated (> 20%)")]
    BandwidthTooSmall { degenerate: usize, total: usize },

    #[error("no admissible bandwidth: every estimated size exceeds alpha")]
    NoAdmissibleBandwidth { curve: Box<SizePowerCurve> },

    #[error("cross-validation failed: every candidate bandwidth was excluded")]
    CvAllExcluded,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateStatistic { .. }
            | Error::DegenerateRegressor
            | Error::DegenerateVariance
            | Error::BandwidthTooSmall { .. } => 2,
            Error::NoAdmissibleBandwidth { .. } => 3,
            Error::Io(_)
            | Error::Parse { .. }
            | Error::TooShort { .. }
            | Error::NonFinite { .. }
            | Error::Explosion { .. }
            | Error::NoSupport { .. } => 4,
            Error::InvalidParameter(_) | Error::Config(_) | Error::CvAllExcluded => 5,
        }
    }
}
