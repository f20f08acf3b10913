//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! reports as JSON text.

use pagepope::audit::run_audit;
use pagepope::exact_poly::{parse_rational, Rational};
use pagepope::family::{self, cpn_catalogue, FamilyError};
use pagepope::geom::{self, GeomError};
use pagepope::limits::{self, LimitError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn family_error(e: FamilyError) -> PyErr {
    match e {
        FamilyError::AuditMismatch { .. } => PyRuntimeError::new_err(e.to_string()),
        other => value_error(other),
    }
}

fn geom_error(e: GeomError) -> PyErr {
    value_error(e)
}

fn limit_error(e: LimitError) -> PyErr {
    value_error(e)
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(value_error)
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Parameter tuple `(n, lambda, c, Lambda, r1)`; numbers given as strings
/// such as `"1/3"` or `"-3"`.
#[pyclass(name = "FamilyParams", frozen, skip_from_py_object)]
struct PyFamilyParams {
    inner: pagepope::FamilyParams,
}

#[pymethods]
impl PyFamilyParams {
    #[new]
    #[pyo3(signature = (n, lam, c, big_lambda, r1))]
    fn new(n: u32, lam: &str, c: &str, big_lambda: &str, r1: &str) -> PyResult<Self> {
        let inner = pagepope::FamilyParams::new(n, rational(lam)?, rational(c)?, rational(big_lambda)?, rational(r1)?)
            .map_err(family_error)?;
        Ok(Self { inner })
    }

    /// Degree `-k` bundle over `CP^n`.
    #[staticmethod]
    fn catalogue(n: u32, k: u32, r1: &str) -> PyResult<Self> {
        let inner = cpn_catalogue(n, k)
            .and_then(|entry| entry.params(parse_rational(r1).map_err(FamilyError::from)?))
            .map_err(family_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }
    #[getter]
    fn lam(&self) -> String {
        self.inner.lambda().to_string()
    }
    #[getter]
    fn c(&self) -> String {
        self.inner.c().to_string()
    }
    #[getter]
    fn big_lambda(&self) -> String {
        self.inner.einstein_constant().to_string()
    }
    #[getter]
    fn r1(&self) -> String {
        self.inner.r1().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "FamilyParams(n={}, lam={}, c={}, big_lambda={}, r1={})",
            self.inner.n(),
            self.inner.lambda(),
            self.inner.c(),
            self.inner.einstein_constant(),
            self.inner.r1()
        )
    }
}

/// Profile `P(r)` in canonical text form.
#[pyfunction]
fn solve_p(params: &PyFamilyParams) -> String {
    family::solve_p(&params.inner).to_string()
}

/// Cone angle factor at the zero section (`r1 > 1`).
#[pyfunction]
fn cone_angle(params: &PyFamilyParams) -> PyResult<String> {
    Ok(family::cone_angle(&params.inner).map_err(family_error)?.to_string())
}

/// Fibre scale `c` giving a smooth metric.
#[pyfunction]
#[pyo3(signature = (n, lam, big_lambda, r1))]
fn smooth_c(n: u32, lam: &str, big_lambda: &str, r1: &str) -> PyResult<String> {
    Ok(family::smooth_c(n, &rational(lam)?, &rational(big_lambda)?, &rational(r1)?)
        .map_err(family_error)?
        .to_string())
}

/// Full family report as JSON.
#[pyfunction]
fn family_report(params: &PyFamilyParams) -> PyResult<String> {
    json(&family::family_report(&params.inner).map_err(family_error)?)
}

/// `max |Ric - Lambda g| / max |g|` at `(r, psi, u, v)` on the `n = 1` chart.
#[pyfunction]
fn einstein_residual(params: &PyFamilyParams, point: [f64; 4]) -> PyResult<f64> {
    let chart = geom::page_pope_chart(&params.inner).map_err(geom_error)?;
    let lambda = pagepope::exact_poly::to_f64(params.inner.einstein_constant());
    geom::einstein_residual(&chart, lambda, &point).map_err(geom_error)
}

/// Curvature summary at a point as JSON.
#[pyfunction]
fn curvature_summary(params: &PyFamilyParams, point: [f64; 4]) -> PyResult<String> {
    let chart = geom::page_pope_chart(&params.inner).map_err(geom_error)?;
    let lambda = pagepope::exact_poly::to_f64(params.inner.einstein_constant());
    let report = geom::curvature(&chart, &point).map_err(geom_error)?;
    json(&report.summary(lambda))
}

/// Rescaled smooth family against the limit, as JSON `{rows, summary}`.
#[pyfunction]
fn limit_comparison(n: u32, t_values: Vec<String>, rho_grid: Vec<f64>) -> PyResult<String> {
    let ts = t_values.iter().map(|t| rational(t)).collect::<PyResult<Vec<_>>>()?;
    let cmp = limits::limit_comparison(n, &ts, &rho_grid).map_err(limit_error)?;
    json(&serde_json::json!({ "rows": cmp.rows, "summary": cmp.summary }))
}

/// Audit rows as JSON.
#[pyfunction]
fn audit() -> PyResult<String> {
    json(&run_audit().map_err(family_error)?)
}

#[pymodule]
fn pagepope_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamilyParams>()?;
    m.add_function(wrap_pyfunction!(solve_p, m)?)?;
    m.add_function(wrap_pyfunction!(cone_angle, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_c, m)?)?;
    m.add_function(wrap_pyfunction!(family_report, m)?)?;
    m.add_function(wrap_pyfunction!(einstein_residual, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_summary, m)?)?;
    m.add_function(wrap_pyfunction!(limit_comparison, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
