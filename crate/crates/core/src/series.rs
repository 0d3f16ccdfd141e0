//! Time-series data model, data-generating processes, CSV ingestion and the
//! innovation-variance estimator.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::Arc;

/// An observed or simulated path `X_0, X_1, ..., X_T` of finite reals.
///
/// `T` counts transitions, so a series holds `T + 1` values and needs at
/// least three of them (`T >= 2`) for any off-diagonal kernel pair to exist.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::TooShort { got: values.len() });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Series { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of transitions `T` (one less than the number of observations).
    pub fn t(&self) -> usize {
        self.values.len() - 1
    }

    /// Initial observation `X_0`.
    pub fn first(&self) -> f64 {
        self.values[0]
    }

    /// Lagged values `X_0, ..., X_(T-1)` (the regressors).
    pub fn lags(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }

    /// Responses `X_1, ..., X_T`.
    pub fn responses(&self) -> &[f64] {
        &self.values[1..]
    }

    /// First differences `X_t - X_(t-1)` for `t = 1..=T`.
    pub fn diffs(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Drift specification for the autoregression `X_t = X_(t-1) + shift(X_(t-1)) + u_t`.
#[derive(Clone)]
pub enum Dgp {
    /// No drift: the null model.
    RandomWalk { sigma_u: f64 },
    /// `shift(x) = beta * x`.
    LinearShift { beta: f64, sigma_u: f64 },
    /// `shift(x) = beta * x + beta / (1 + |x|^gamma)`.
    NonlinearShift { beta: f64, gamma: f64, sigma_u: f64 },
    /// User-supplied drift function.
    CustomShift {
        shift: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        sigma_u: f64,
    },
}

impl fmt::Debug for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dgp::RandomWalk { sigma_u } => {
                write!(f, "RandomWalk {{ sigma_u: {sigma_u} }}")
            }
            Dgp::LinearShift { beta, sigma_u } => {
                write!(f, "LinearShift {{ beta: {beta}, sigma_u: {sigma_u} }}")
            }
            Dgp::NonlinearShift {
                beta,
                gamma,
                sigma_u,
            } => write!(
                f,
                "NonlinearShift {{ beta: {beta}, gamma: {gamma}, sigma_u: {sigma_u} }}"
            ),
            Dgp::CustomShift { sigma_u, .. } => {
                write!(f, "CustomShift {{ sigma_u: {sigma_u} }}")
            }
        }
    }
}

impl Dgp {
    pub fn sigma_u(&self) -> f64 {
        match self {
            Dgp::RandomWalk { sigma_u }
            | Dgp::LinearShift { sigma_u, .. }
            | Dgp::NonlinearShift { sigma_u, .. }
            | Dgp::CustomShift { sigma_u, .. } => *sigma_u,
        }
    }

    /// Drift evaluated at a lagged value.
    pub fn shift(&self, x: f64) -> f64 {
        match self {
            Dgp::RandomWalk { .. } => 0.0,
            Dgp::LinearShift { beta, .. } => beta * x,
            Dgp::NonlinearShift { beta, gamma, .. } => beta * x + beta / (1.0 + x.abs().powf(*gamma)),
            Dgp::CustomShift { shift, .. } => shift(x),
        }
    }

    /// Hard parameter constraints: nonnegative noise, positive `gamma`.
    pub fn validate(&self) -> Result<()> {
        let sigma_u = self.sigma_u();
        if !(sigma_u >= 0.0 && sigma_u.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_u must be finite and >= 0, got {sigma_u}"
            )));
        }
        if let Dgp::NonlinearShift { gamma, .. } = self {
            if !(*gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma must be finite and > 0, got {gamma}"
                )));
            }
        }
        Ok(())
    }

    /// Advisory warning when `beta` leaves the stationarity region (-2, 0).
    pub fn stationarity_warning(&self) -> Option<String> {
        let beta = match self {
            Dgp::LinearShift { beta, .. } | Dgp::NonlinearShift { beta, .. } => *beta,
            _ => return None,
        };
        if beta <= -2.0 || beta >= 0.0 {
            Some(format!(
                "beta = {beta} lies outside the stationarity region (-2, 0); \
                 the alternative path may not be stationary"
            ))
        } else {
            None
        }
    }
}

/// Simulate a path of `t` transitions starting at `X_0 = 0`.
pub fn simulate(dgp: &Dgp, t: usize, stream: &RngStream) -> Result<Series> {
    dgp.validate()?;
    if t < 2 {
        return Err(Error::InvalidParameter(format!(
            "need T >= 2 transitions, got {t}"
        )));
    }
    let sigma_u = dgp.sigma_u();
    let eps = stream.standard_normals(t);
    let mut values = Vec::with_capacity(t + 1);
    let mut x = 0.0f64;
    values.push(x);
    for (step, e) in eps.iter().enumerate() {
        x = x + dgp.shift(x) + sigma_u * e;
        if !x.is_finite() {
            return Err(Error::Explosion { index: step + 1 });
        }
        values.push(x);
    }
    Ok(Series { values })
}

/// Innovation standard deviation estimate: root mean squared first
/// difference, `sqrt((1/T) * sum (X_t - X_(t-1))^2)`. Consistent for
/// `sigma_u` under the random-walk null; zero iff the series is constant.
pub fn sigma_u_hat(series: &Series) -> f64 {
    let t = series.t() as f64;
    let ss: f64 = series
        .values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d * d
        })
        .sum();
    (ss / t).sqrt()
}

/// Read a series from CSV-ish text: one observation per line, an optional
/// single header line, and an optional ignored second column. The first
/// value becomes `X_0`.
pub fn ingest_csv<R: Read>(source: R) -> Result<Series> {
    let reader = BufReader::new(source);
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let field = trimmed.split(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("non-finite value {v}"),
                })
            }
            Err(_) => {
                // Only the very first line may be a header.
                if line_no == 1 && values.is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("could not parse '{field}' as a number"),
                });
            }
        }
    }
    Series::new(values)
}

/// Write a series as CSV with a `value` header, 17 significant digits per
/// observation (round-trips every f64 exactly).
pub fn write_csv<W: Write>(series: &Series, mut out: W) -> std::io::Result<()> {
    writeln!(out, "value")?;
    for v in &series.values {
        writeln!(out, "{v:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn series_validation() {
        assert!(matches!(
            Series::new(vec![1.0, 2.0]),
            Err(Error::TooShort { got: 2 })
        ));
        assert!(matches!(
            Series::new(vec![1.0, f64::NAN, 2.0]),
            Err(Error::NonFinite { index: 1 })
        ));
        let s = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.t(), 2);
        assert_eq!(s.lags(), &[1.0, 2.0]);
        assert_eq!(s.responses(), &[2.0, 3.0]);
    }

    #[test]
    fn zero_noise_random_walk_stays_at_zero() {
        let dgp = Dgp::RandomWalk { sigma_u: 0.0 };
        let s = simulate(&dgp, 5, &RngStream::new(1)).unwrap();
        assert_eq!(s.values(), &[0.0; 6]);
    }

    #[test]
    fn zero_noise_linear_shift_fixed_point_at_zero() {
        let dgp = Dgp::LinearShift {
            beta: -1.0,
            sigma_u: 0.0,
        };
        let s = simulate(&dgp, 3, &RngStream::new(1)).unwrap();
        assert_eq!(s.values(), &[0.0; 4]);
    }

    #[test]
    fn explosive_drift_is_reported_with_first_bad_index() {
        // shift(x) = x^2 + 10 explodes after a few steps at zero noise.
        let dgp = Dgp::CustomShift {
            shift: Arc::new(|x: f64| x * x + 10.0),
            sigma_u: 0.0,
        };
        let err = simulate(&dgp, 50, &RngStream::new(1)).unwrap_err();
        match err {
            Error::Explosion { index } => assert!(index >= 1 && index <= 50),
            other => panic!("expected explosion, got {other:?}"),
        }
    }

    #[test]
    fn simulate_is_deterministic() {
        let dgp = Dgp::NonlinearShift {
            beta: -0.1,
            gamma: 0.5,
            sigma_u: 0.05f64.sqrt(),
        };
        let stream = RngStream::new(99).child(4);
        let a = simulate(&dgp, 200, &stream).unwrap();
        let b = simulate(&dgp, 200, &stream).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stationary_nonlinear_path_has_bounded_spread() {
        let dgp = Dgp::NonlinearShift {
            beta: -0.1,
            gamma: 0.5,
            sigma_u: 0.05f64.sqrt(),
        };
        let s = simulate(&dgp, 750, &RngStream::new(7)).unwrap();
        let mean = s.values().iter().sum::<f64>() / s.values().len() as f64;
        let var = s
            .values()
            .iter()
            .map(|v| (v - mean).powi(2))
            .sum::<f64>()
            / s.values().len() as f64;
        // AR(1)-like stationary variance is near sigma_u^2 / (1 - (1+beta)^2);
        // a random walk of this length would wander far beyond it.
        assert!(var < 3.0, "variance {var} looks nonstationary");
    }

    #[test]
    fn dgp_validation_and_warnings() {
        assert!(Dgp::NonlinearShift {
            beta: -0.1,
            gamma: 0.0,
            sigma_u: 1.0
        }
        .validate()
        .is_err());
        assert!(Dgp::RandomWalk { sigma_u: -1.0 }.validate().is_err());
        assert!(Dgp::LinearShift {
            beta: 0.5,
            sigma_u: 1.0
        }
        .stationarity_warning()
        .is_some());
        assert!(Dgp::LinearShift {
            beta: -0.5,
            sigma_u: 1.0
        }
        .stationarity_warning()
        .is_none());
        assert!(Dgp::RandomWalk { sigma_u: 1.0 }
            .stationarity_warning()
            .is_none());
    }

    #[test]
    fn sigma_u_hat_hand_example() {
        let s = Series::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(sigma_u_hat(&s), 1.0);
        let c = Series::new(vec![4.0, 4.0, 4.0, 4.0]).unwrap();
        assert_eq!(sigma_u_hat(&c), 0.0);
    }

    #[test]
    fn sigma_u_hat_is_consistent_under_the_null() {
        // sigma_u^2 = 0.05, T = 750; the estimator of sigma^2 has MC sd
        // sqrt(2/T) * sigma^2 ~ 0.00258.
        let dgp = Dgp::RandomWalk {
            sigma_u: 0.05f64.sqrt(),
        };
        let s = simulate(&dgp, 750, &RngStream::new(3)).unwrap();
        let est = sigma_u_hat(&s).powi(2);
        let se = (2.0f64 / 750.0).sqrt() * 0.05;
        assert!(
            (est - 0.05).abs() < 3.0 * se,
            "sigma_u_hat^2 = {est}, expected within {} of 0.05",
            3.0 * se
        );
    }

    #[test]
    fn ingest_csv_basic_header_and_errors() {
        let s = ingest_csv("1.0\n2.0\n3.5\n".as_bytes()).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.5]);
        assert_eq!(s.t(), 2);

        let s = ingest_csv("value\n1.0\n2.0\n3.0\n".as_bytes()).unwrap();
        assert_eq!(s.t(), 2);

        let err = ingest_csv("1.0\nabc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = ingest_csv("1.0\n2.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::TooShort { got: 2 }));

        // Second column ignored.
        let s = ingest_csv("value,date\n1.5,1963-01\n2.5,1963-02\n3.5,1963-03\n".as_bytes())
            .unwrap();
        assert_eq!(s.values(), &[1.5, 2.5, 3.5]);

        let err = ingest_csv("1.0\nnan\n3.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(values in proptest::collection::vec(-1e12f64..1e12, 3..60)) {
            let series = Series::new(values).unwrap();
            let mut buf = Vec::new();
            write_csv(&series, &mut buf).unwrap();
            let back = ingest_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.values(), series.values());
        }

        #[test]
        fn sigma_u_hat_translation_invariant_and_scales(
            // Values on a dyadic lattice so that adding an integer shift is
            // exact in f64; invariance is then exact, not approximate.
            ticks in proptest::collection::vec(-(1i64 << 30)..(1i64 << 30), 3..50),
            shift in -(1i64 << 20)..(1i64 << 20),
            scale in prop_oneof![Just(0.5f64), Just(3.0), Just(-2.0)],
        ) {
            let values: Vec<f64> = ticks.iter().map(|&k| k as f64 / (1u64 << 20) as f64).collect();
            let s = Series::new(values.clone()).unwrap();
            let base = sigma_u_hat(&s);

            let shifted = Series::new(values.iter().map(|v| v + shift as f64).collect()).unwrap();
            prop_assert_eq!(sigma_u_hat(&shifted), base);

            let scaled = Series::new(values.iter().map(|v| v * scale).collect()).unwrap();
            let got = sigma_u_hat(&scaled);
            let want = scale.abs() * base;
            prop_assert!((got - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }
}
