//! Python bindings for the random-walk kernel test.
//!
//! Build with `cargo build --release -p rwkernel-py`, then import the
//! produced cdylib as `rwkernel_py` (see `python/smoke_test.py`).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rwkernel::bootstrap::{BootstrapSpec, Innovation};
use rwkernel::experiments::{run_data_analysis, AnalysisOptions, DfCalibration};
use rwkernel::rng::RngStream;
use rwkernel::series::Dgp;
use rwkernel::{Bandwidth, Error, Kernel};
use std::str::FromStr;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::InvalidParameter(_) | Error::Config(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn kernel_from(name: &str) -> PyResult<Kernel> {
    Kernel::from_str(name).map_err(to_py_err)
}

fn bandwidth(h: f64) -> PyResult<Bandwidth> {
    Bandwidth::new(h).map_err(to_py_err)
}

fn innovation_from(name: &str) -> PyResult<Innovation> {
    match name {
        "normal" | "standard-normal" => Ok(Innovation::StandardNormal),
        "resample" | "resampled-differences" => Ok(Innovation::ResampledDifferences),
        other => Err(PyValueError::new_err(format!(
            "unknown innovation '{other}'"
        ))),
    }
}

fn dgp_from(name: &str, beta: f64, gamma: f64, sigma_u: f64) -> PyResult<Dgp> {
    match name {
        "rw" | "random-walk" => Ok(Dgp::RandomWalk { sigma_u }),
        "linear" => Ok(Dgp::LinearShift { beta, sigma_u }),
        "nonlinear" => Ok(Dgp::NonlinearShift {
            beta,
            gamma,
            sigma_u,
        }),
        other => Err(PyValueError::new_err(format!("unknown dgp '{other}'"))),
    }
}

/// An observed or simulated series X_0..X_T.
#[pyclass(name = "Series", skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: rwkernel::Series,
}

#[pymethods]
impl PySeries {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(PySeries {
            inner: rwkernel::Series::new(values).map_err(to_py_err)?,
        })
    }

    /// Load a series from a CSV file (one value per line, optional header).
    #[staticmethod]
    fn from_csv(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| PyRuntimeError::new_err(format!("{path}: {e}")))?;
        Ok(PySeries {
            inner: rwkernel::ingest_csv(file).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    /// Number of transitions T.
    #[getter]
    fn t(&self) -> usize {
        self.inner.t()
    }

    /// Innovation standard deviation estimate (root mean squared first
    /// difference).
    fn sigma_u_hat(&self) -> f64 {
        rwkernel::sigma_u_hat(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __repr__(&self) -> String {
        format!("Series(T={}, x0={})", self.inner.t(), self.inner.first())
    }
}

/// Studentized kernel test outcome.
#[pyclass(name = "TestOutcome", skip_from_py_object)]
#[derive(Clone)]
struct PyTestOutcome {
    #[pyo3(get)]
    m: f64,
    #[pyo3(get)]
    sigma: f64,
    #[pyo3(get)]
    l: f64,
    #[pyo3(get)]
    h: f64,
    #[pyo3(get)]
    t: usize,
    #[pyo3(get)]
    pair_count: usize,
}

#[pymethods]
impl PyTestOutcome {
    fn __repr__(&self) -> String {
        format!(
            "TestOutcome(l={}, m={}, sigma={}, h={}, T={}, pair_count={})",
            self.l, self.m, self.sigma, self.h, self.t, self.pair_count
        )
    }
}

impl From<rwkernel::TestOutcome> for PyTestOutcome {
    fn from(out: rwkernel::TestOutcome) -> Self {
        PyTestOutcome {
            m: out.m_value,
            sigma: out.sigma_hat,
            l: out.l_value,
            h: out.h.get(),
            t: out.t,
            pair_count: out.pair_count,
        }
    }
}

/// Dickey-Fuller comparator outcome.
#[pyclass(name = "DfOutcome", skip_from_py_object)]
#[derive(Clone)]
struct PyDfOutcome {
    #[pyo3(get)]
    beta_hat: f64,
    #[pyo3(get)]
    sigma_hat: f64,
    #[pyo3(get)]
    l0: f64,
}

#[pymethods]
impl PyDfOutcome {
    fn __repr__(&self) -> String {
        format!(
            "DfOutcome(l0={}, beta_hat={}, sigma_hat={})",
            self.l0, self.beta_hat, self.sigma_hat
        )
    }
}

/// Simulate a path from a built-in process ("rw", "linear", "nonlinear").
#[pyfunction]
#[pyo3(signature = (dgp, t, seed, beta=0.0, gamma=0.5, sigma2=0.05))]
fn simulate(
    dgp: &str,
    t: usize,
    seed: u64,
    beta: f64,
    gamma: f64,
    sigma2: f64,
) -> PyResult<PySeries> {
    if sigma2 < 0.0 {
        return Err(PyValueError::new_err("sigma2 must be nonnegative"));
    }
    let dgp = dgp_from(dgp, beta, gamma, sigma2.sqrt())?;
    let series =
        rwkernel::simulate(&dgp, t, &RngStream::new(seed).child(5)).map_err(to_py_err)?;
    Ok(PySeries { inner: series })
}

/// Studentized kernel statistic L_T(h).
#[pyfunction]
#[pyo3(signature = (series, h, kernel="uniform"))]
fn l_stat(series: &PySeries, h: f64, kernel: &str) -> PyResult<PyTestOutcome> {
    rwkernel::l_stat(&series.inner, kernel_from(kernel)?, bandwidth(h)?)
        .map(PyTestOutcome::from)
        .map_err(to_py_err)
}

/// Diagnostic statistic N_T(h).
#[pyfunction]
#[pyo3(signature = (series, h, kernel="uniform"))]
fn n_stat(series: &PySeries, h: f64, kernel: &str) -> PyResult<f64> {
    Ok(rwkernel::n_stat(
        &series.inner,
        kernel_from(kernel)?,
        bandwidth(h)?,
    ))
}

/// Dickey-Fuller comparator L_0.
#[pyfunction]
fn dickey_fuller(series: &PySeries) -> PyResult<PyDfOutcome> {
    let out = rwkernel::dickey_fuller(&series.inner).map_err(to_py_err)?;
    Ok(PyDfOutcome {
        beta_hat: out.beta_hat,
        sigma_hat: out.sigma_hat,
        l0: out.l0,
    })
}

/// Bootstrap p-value of L_T(h) under the resampling null.
#[pyfunction]
#[pyo3(signature = (series, h, b=99, seed=0, kernel="uniform", innovation="normal"))]
fn p_value(
    series: &PySeries,
    h: f64,
    b: usize,
    seed: u64,
    kernel: &str,
    innovation: &str,
) -> PyResult<f64> {
    let out = rwkernel::p_value(
        &series.inner,
        kernel_from(kernel)?,
        bandwidth(h)?,
        b,
        innovation_from(innovation)?,
        &RngStream::new(seed).child(4),
    )
    .map_err(to_py_err)?;
    Ok(out.p)
}

/// Rate-condition bandwidth window (h_lo, h_hi) for a sample size.
#[pyfunction]
#[pyo3(signature = (t, eps0=0.1))]
fn admissible_window(t: usize, eps0: f64) -> PyResult<(f64, f64)> {
    rwkernel::admissible_window(t, eps0).map_err(to_py_err)
}

/// Geometric bandwidth ladder ending at h_test.
#[pyfunction]
fn bandwidth_ladder(h_test: f64) -> PyResult<Vec<f64>> {
    Ok(rwkernel::bandwidth_ladder(bandwidth(h_test)?)
        .iter()
        .map(|b| b.get())
        .collect())
}

/// Asymptotic variance C10 * T^(3/2) * h of the double-sum statistic.
#[pyfunction]
#[pyo3(signature = (t, h, sigma_u, kernel="uniform"))]
fn theoretical_variance(t: usize, h: f64, sigma_u: f64, kernel: &str) -> PyResult<f64> {
    Ok(rwkernel::theoretical_variance(
        t,
        bandwidth(h)?,
        sigma_u,
        kernel_from(kernel)?,
    ))
}

/// Full test pipeline: kernel statistic and Dickey-Fuller comparator with
/// bootstrap p-values at a fixed bandwidth. Returns the report as a dict
/// (same schema as the CLI's JSON report).
#[pyfunction]
#[pyo3(signature = (series, h, b=99, seed=0, alpha=0.05, kernel="uniform", innovation="normal"))]
#[allow(clippy::too_many_arguments)]
fn run_test<'py>(
    py: Python<'py>,
    series: &PySeries,
    h: f64,
    b: usize,
    seed: u64,
    alpha: f64,
    kernel: &str,
    innovation: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = AnalysisOptions {
        kernel: kernel_from(kernel)?,
        h: Some(h),
        grid: None,
        calibration_alt: None,
        spec: BootstrapSpec {
            b,
            m: 1,
            alpha,
            innovation: innovation_from(innovation)?,
            master_seed: seed,
            literal_recursion: false,
        },
        df_calibration: DfCalibration::Bootstrap,
    };
    let report = run_data_analysis(&series.inner, "python", &opts).map_err(to_py_err)?;
    let json = serde_json::to_value(&report)
        .map_err(|e| PyRuntimeError::new_err(format!("serialize: {e}")))?;
    json_to_pydict(py, &json)
}

fn json_to_pydict<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    if let serde_json::Value::Object(map) = value {
        for (key, v) in map {
            dict.set_item(key, json_to_pyobject(py, v)?)?;
        }
    }
    Ok(dict)
}

fn json_to_pyobject(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use pyo3::IntoPyObjectExt;
    match value {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = pyo3::types::PyList::empty(py);
            for item in items {
                list.append(json_to_pyobject(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(_) => json_to_pydict(py, value)?.into_py_any(py),
    }
}

#[pymodule]
fn rwkernel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_class::<PyTestOutcome>()?;
    m.add_class::<PyDfOutcome>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(l_stat, m)?)?;
    m.add_function(wrap_pyfunction!(n_stat, m)?)?;
    m.add_function(wrap_pyfunction!(dickey_fuller, m)?)?;
    m.add_function(wrap_pyfunction!(p_value, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_window, m)?)?;
    m.add_function(wrap_pyfunction!(bandwidth_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_variance, m)?)?;
    m.add_function(wrap_pyfunction!(run_test, m)?)?;
    Ok(())
}
