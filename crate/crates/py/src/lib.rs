//! Python bindings: the main types and operations of the counting library
//! exposed as the `goldbach_py` extension module.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use goldbach_core as core;
use goldbach_core::{Error, Membership, QuadraticIrrational, Window};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Budget(_) | Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Recursively convert a serde_json value into Python objects.
fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        serde_json::Value::Number(n) => {
            if let Some(v) = n.as_u64() {
                v.into_pyobject(py)?.into_any().unbind()
            } else if let Some(v) = n.as_i64() {
                v.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap().into_pyobject(py)?.into_any().unbind()
            }
        }
        serde_json::Value::String(s) => PyString::new(py, s).into_any().unbind(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn serialize_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let json =
        serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &json)
}

/// A quadratic irrationality (p0 + sqrt(d))/q0.
#[pyclass(name = "Eta", frozen)]
struct PyEta {
    inner: QuadraticIrrational,
}

#[pymethods]
impl PyEta {
    #[new]
    fn new(p0: i64, d: u64, q0: i64) -> PyResult<Self> {
        Ok(PyEta {
            inner: core::make_eta(p0, d, q0).map_err(to_py_err)?,
        })
    }

    /// Parse "p0,d,q0".
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        Ok(PyEta {
            inner: QuadraticIrrational::parse(s).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Eta({})", self.inner)
    }

    fn __float__(&self) -> f64 {
        self.inner.to_f64()
    }

    /// Continued fraction as (preperiod, period).
    #[pyo3(signature = (max_steps = 100_000))]
    fn cf(&self, max_steps: usize) -> PyResult<(Vec<i64>, Vec<i64>)> {
        let cf = core::cf_expand(&self.inner, max_steps).map_err(to_py_err)?;
        Ok((cf.preperiod, cf.period))
    }

    /// First `count` convergents as (D, Q, theta2) triples.
    fn convergents(&self, count: usize) -> PyResult<Vec<(BigInt, BigInt, f64)>> {
        let cf = core::cf_expand(&self.inner, 1 << 20).map_err(to_py_err)?;
        let cs = core::convergents(&self.inner, &cf, count).map_err(to_py_err)?;
        Ok(cs.into_iter().map(|c| (c.d, c.q, c.theta2)).collect())
    }

    /// Convergent with the largest Q <= tau1, as ((D, Q, theta2), Q/tau1).
    fn best_convergent(&self, tau1: u64) -> PyResult<((BigInt, BigInt, f64), f64)> {
        let (c, ratio) = core::best_convergent(&self.inner, tau1).map_err(to_py_err)?;
        Ok(((c.d, c.q, c.theta2), ratio))
    }

    /// Certified {eta*p} as (value, radius).
    #[pyo3(signature = (p, bits = 128))]
    fn frac(&self, p: u64, bits: u32) -> PyResult<(f64, f64)> {
        let cf = core::frac_eta_p(&self.inner, p, bits).map_err(to_py_err)?;
        let radius = cf.radius();
        Ok((
            cf.to_f64(),
            radius.numer().to_string().parse::<f64>().unwrap_or(0.0)
                / radius.denom().to_string().parse::<f64>().unwrap_or(1.0),
        ))
    }

    /// Exact decision a < {eta*p} < b.
    fn classify(&self, p: u64, window: &PyWindow) -> PyResult<bool> {
        let m = core::classify_point(&self.inner, p, &window.inner).map_err(to_py_err)?;
        Ok(m == Membership::Inside)
    }
}

/// A rational window (a, b) in (0, 1), e.g. Window("1/5", "17/20").
#[pyclass(name = "Window", frozen)]
struct PyWindow {
    inner: Window,
}

#[pymethods]
impl PyWindow {
    #[new]
    fn new(a: &str, b: &str) -> PyResult<Self> {
        let a = core::parse_rational(a).map_err(to_py_err)?;
        let b = core::parse_rational(b).map_err(to_py_err)?;
        Ok(PyWindow {
            inner: Window::new(a, b).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Window({})", self.inner.to_string_exact())
    }

    /// b - a.
    fn width(&self) -> f64 {
        self.inner.width_f64()
    }

    /// The periodic indicator at x.
    fn psi0(&self, x: f64) -> u8 {
        core::psi0(&self.inner, x)
    }

    /// Fourier coefficient c(m) of the indicator.
    fn box_coeff(&self, m: i64) -> (f64, f64) {
        let c = core::box_coeff(&self.inner, m);
        (c.re, c.im)
    }

    /// Triple cyclic self-convolution of the indicator at x.
    fn triple_conv(&self, x: f64) -> f64 {
        core::triple_conv(&self.inner, x)
    }
}

/// pi(n).
#[pyfunction]
fn primes_count(n: u64) -> PyResult<u64> {
    Ok(core::primes_up_to(n).map_err(to_py_err)?.count())
}

/// (pi_constrained(n), density) for the window-constrained prime set.
#[pyfunction]
fn constrained_density(n: u64, eta: &PyEta, window: &PyWindow) -> PyResult<(u64, f64)> {
    let primes = core::primes_up_to(n).map_err(to_py_err)?;
    let cset = core::constrained_set(&primes, &eta.inner, &window.inner).map_err(to_py_err)?;
    let d = core::density(&cset, &primes).map_err(to_py_err)?;
    Ok((cset.count(), d))
}

/// Exact I(n) (unconstrained) or J(n) when a window constraint is given.
#[pyfunction]
#[pyo3(signature = (n, eta = None, window = None))]
fn ternary_count(n: u64, eta: Option<&PyEta>, window: Option<&PyWindow>) -> PyResult<u64> {
    let primes = core::primes_up_to(n.max(2)).map_err(to_py_err)?;
    let ind = match (eta, window) {
        (Some(e), Some(w)) => {
            let cset =
                core::constrained_set(&primes, &e.inner, &w.inner).map_err(to_py_err)?;
            core::WeightedIndicator::from_constrained(&cset)
        }
        (None, None) => core::WeightedIndicator::from_primes(&primes),
        _ => return Err(PyValueError::new_err("supply both eta and window, or neither")),
    };
    core::ternary_count(&ind, n).map_err(to_py_err)
}

/// Quadratic-time oracle count (n <= 10^4).
#[pyfunction]
#[pyo3(signature = (n, eta = None, window = None))]
fn ternary_count_brute(n: u64, eta: Option<&PyEta>, window: Option<&PyWindow>) -> PyResult<u64> {
    let primes = core::primes_up_to(n.max(2)).map_err(to_py_err)?;
    let ind = match (eta, window) {
        (Some(e), Some(w)) => {
            let cset =
                core::constrained_set(&primes, &e.inner, &w.inner).map_err(to_py_err)?;
            core::WeightedIndicator::from_constrained(&cset)
        }
        (None, None) => core::WeightedIndicator::from_primes(&primes),
        _ => return Err(PyValueError::new_err("supply both eta and window, or neither")),
    };
    core::ternary_count_brute(&ind, n).map_err(to_py_err)
}

/// sigma(N,a,b) as a dict {value, tail_bound, truncation}.
#[pyfunction]
#[pyo3(signature = (eta, n, window, tol = 1e-10))]
fn sigma_window(
    py: Python<'_>,
    eta: &PyEta,
    n: u64,
    window: &PyWindow,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let sv = core::sigma_window(&eta.inner, n, &window.inner, tol).map_err(to_py_err)?;
    serialize_to_py(py, &sv)
}

/// Singular series sigma(N) as a dict {value, tail_bound, truncation}.
#[pyfunction]
#[pyo3(signature = (n, tol = 1e-9, paper_literal = false))]
fn singular_series(py: Python<'_>, n: u64, tol: f64, paper_literal: bool) -> PyResult<Py<PyAny>> {
    let sv = core::singular_series(n, tol, paper_literal).map_err(to_py_err)?;
    serialize_to_py(py, &sv)
}

/// Main term sigma_n * N^2 / (2 ln^3 N).
#[pyfunction]
fn main_term(n: u64, sigma_n: f64) -> PyResult<f64> {
    core::main_term(n, sigma_n).map_err(to_py_err)
}

/// Counts with rigorous container bounds: {n, j, i, j1, j2}.
#[pyfunction]
#[pyo3(signature = (n, eta, window, delta, r = 3))]
fn sandwich_counts(
    py: Python<'_>,
    n: u64,
    eta: &PyEta,
    window: &PyWindow,
    delta: &str,
    r: u32,
) -> PyResult<Py<PyAny>> {
    let delta = core::parse_rational(delta).map_err(to_py_err)?;
    let res = core::sandwich_counts(n, &eta.inner, &window.inner, &delta, r).map_err(to_py_err)?;
    serialize_to_py(py, &res)
}

/// Minor-arc diagnostics report as a dict.
#[pyfunction]
#[pyo3(signature = (n, a_exp, b_exp, samples, seed, eta = None))]
fn arc_scan(
    py: Python<'_>,
    n: u64,
    a_exp: f64,
    b_exp: f64,
    samples: u64,
    seed: u64,
    eta: Option<&PyEta>,
) -> PyResult<Py<PyAny>> {
    let primes = core::primes_up_to(n).map_err(to_py_err)?;
    let sqrt2 = core::make_eta(0, 2, 1).map_err(to_py_err)?;
    let eta = eta.map(|e| e.inner.clone()).unwrap_or(sqrt2);
    let report =
        core::minor_arc_scan(&primes, &eta, a_exp, b_exp, samples, seed).map_err(to_py_err)?;
    serialize_to_py(py, &report)
}

/// Run a sweep from a JSON config string; returns the rows as dicts.
#[pyfunction]
fn run_sweep(py: Python<'_>, config_json: &str) -> PyResult<Py<PyAny>> {
    let config: core::SweepConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let rows = core::run_sweep(&config).map_err(to_py_err)?;
    serialize_to_py(py, &rows)
}

/// Headline model-fit summary over sweep rows given as a JSON string.
#[pyfunction]
fn headline_report(py: Python<'_>, rows_json: &str) -> PyResult<Py<PyAny>> {
    let rows: Vec<core::SweepRow> =
        serde_json::from_str(rows_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let summary = core::headline_report(&rows).map_err(to_py_err)?;
    serialize_to_py(py, &summary)
}

#[pymodule]
fn goldbach_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEta>()?;
    m.add_class::<PyWindow>()?;
    m.add_function(wrap_pyfunction!(primes_count, m)?)?;
    m.add_function(wrap_pyfunction!(constrained_density, m)?)?;
    m.add_function(wrap_pyfunction!(ternary_count, m)?)?;
    m.add_function(wrap_pyfunction!(ternary_count_brute, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_window, m)?)?;
    m.add_function(wrap_pyfunction!(singular_series, m)?)?;
    m.add_function(wrap_pyfunction!(main_term, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_counts, m)?)?;
    m.add_function(wrap_pyfunction!(arc_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(headline_report, m)?)?;
    Ok(())
}
