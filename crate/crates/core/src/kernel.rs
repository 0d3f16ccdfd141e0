//! Compactly supported probability kernels and bandwidth rules.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A symmetric probability kernel with compact support `[-c1, c1]`.
///
/// The support boundary is closed: `evaluate(1.0)` is nonzero for the uniform
/// kernel, which keeps the `|d| <= c1 * h` neighbor predicate of the fast
/// pair scan aligned with the kernel itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `K(x) = 1/2` on `[-1, 1]`.
    Uniform,
    /// `K(x) = 3/4 (1 - x^2)` on `[-1, 1]`.
    Epanechnikov,
}

impl Kernel {
    pub fn evaluate(self, x: f64) -> f64 {
        match self {
            Kernel::Uniform => {
                if x.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            Kernel::Epanechnikov => {
                if x.abs() <= 1.0 {
                    0.75 * (1.0 - x * x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Support radius `c1`.
    pub fn support_radius(self) -> f64 {
        1.0
    }

    /// `J02 = integral of K^2`.
    pub fn l2_norm(self) -> f64 {
        match self {
            Kernel::Uniform => 0.5,
            Kernel::Epanechnikov => 0.6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Uniform => "uniform",
            Kernel::Epanechnikov => "epanechnikov",
        }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Uniform
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Kernel::Uniform),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            other => Err(Error::Config(format!(
                "unknown kernel '{other}' (expected 'uniform' or 'epanechnikov')"
            ))),
        }
    }
}

/// A positive, finite bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(Bandwidth(h))
        } else {
            Err(Error::InvalidParameter(format!(
                "bandwidth must be positive and finite, got {h}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bandwidth window `(T^(-1/2 + eps0), T^(-3/10))` inside which the rate
/// conditions hold. Bandwidths outside it are legitimate to explore, so
/// callers warn rather than fail.
pub fn admissible_window(t: usize, eps0: f64) -> Result<(f64, f64)> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "need T >= 2 for an admissible window, got {t}"
        )));
    }
    if !(eps0 > 0.0 && eps0 < 0.2) {
        return Err(Error::InvalidParameter(format!(
            "eps0 must lie in (0, 0.2), got {eps0}"
        )));
    }
    let tf = t as f64;
    Ok((tf.powf(-0.5 + eps0), tf.powf(-0.3)))
}

/// Default `eps0` used when checking a bandwidth against the window.
pub const DEFAULT_EPS0: f64 = 0.1;

/// Geometric ladder `h_i = h_test / 2^(5-i)`, `i = 1..=5`, ending at `h_test`.
pub fn bandwidth_ladder(h_test: Bandwidth) -> [Bandwidth; 5] {
    let h = h_test.get();
    [
        Bandwidth(h / 16.0),
        Bandwidth(h / 8.0),
        Bandwidth(h / 4.0),
        Bandwidth(h / 2.0),
        Bandwidth(h),
    ]
}
