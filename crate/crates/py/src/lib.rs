//! Python bindings: `import snum`.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyList, PyString};
use serde_json::Value;

use snum_core::acceptance::{run_acceptance, run_selected, AcceptanceConfig};
use snum_core::hilbert::{self, HilbertOrdering};
use snum_core::john;
use snum_core::lorentz::{self, LorentzParams};
use snum_core::scalar::{decimal, q, Exact, Mode, Scalar};
use snum_core::snumbers::{self as sn, SNumberBound, Scope, StepSubspace};
use snum_core::volterra;
use snum_core::zigzag::ZigzagSearch;
use snum_core::SnumError;

fn err(e: SnumError) -> PyErr {
    match e {
        SnumError::Precondition(_)
        | SnumError::DimensionMismatch(_)
        | SnumError::Domain(_)
        | SnumError::UnsupportedRegime { .. }
        | SnumError::IndexOutOfRange(_)
        | SnumError::InvalidStep(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => PyInt::new(py, i).into_any(),
            (None, Some(u)) => PyInt::new(py, u).into_any(),
            _ => PyFloat::new(py, n.as_f64().unwrap_or(f64::NAN)).into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn json_of<T: serde::Serialize>(t: &T) -> PyResult<Value> {
    serde_json::to_value(t).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Rational from a Python int, a `"p/q"` string, or a float (read as its shortest decimal).
fn to_exact(obj: &Bound<'_, PyAny>) -> PyResult<Exact> {
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(q(i, 1));
    }
    if let Ok(s) = obj.extract::<String>() {
        return Exact::parse_json(&s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s:?}")));
    }
    let f: f64 = obj.extract()?;
    decimal(f).ok_or_else(|| PyValueError::new_err("non-finite value"))
}

fn subspace(cell_values: &Bound<'_, PyList>) -> PyResult<StepSubspace> {
    let mut rows = Vec::new();
    for row in cell_values.iter() {
        let row: Vec<Exact> = row.try_iter()?.map(|x| to_exact(&x?)).collect::<PyResult<_>>()?;
        rows.push(row);
    }
    let cells = rows.first().map_or(0, Vec::len);
    StepSubspace::from_cell_values(cells, rows).map_err(err)
}

/// A lower/upper bound on one s-number, with its witness.
#[pyclass(name = "SNumberBound", frozen, module = "snum")]
struct PyBound {
    inner: SNumberBound,
}

#[pymethods]
impl PyBound {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.symbol()
    }
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn lower(&self) -> f64 {
        self.inner.lower
    }
    #[getter]
    fn upper(&self) -> f64 {
        self.inner.upper
    }
    #[getter]
    fn lower_exact(&self) -> Option<String> {
        self.inner.lower_exact.clone()
    }
    #[getter]
    fn upper_exact(&self) -> Option<String> {
        self.inner.upper_exact.clone()
    }
    #[getter]
    fn status(&self) -> String {
        self.inner.status.to_string()
    }
    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }
    #[getter]
    fn scope(&self) -> &'static str {
        match self.inner.scope {
            Scope::Operator => "operator",
            Scope::Subspace => "subspace",
        }
    }
    #[getter]
    fn anchor(&self) -> String {
        self.inner.anchor.clone()
    }
    #[getter]
    fn certified(&self) -> bool {
        self.inner.is_certified()
    }
    #[getter]
    fn witness<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.witness)
    }
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &json_of(&self.inner)?)
    }
    fn __repr__(&self) -> String {
        let b = &self.inner;
        let lo = b.lower_exact.clone().unwrap_or_else(|| b.lower.to_string());
        let up = b.upper_exact.clone().unwrap_or_else(|| b.upper.to_string());
        format!("SNumberBound({}_{}: [{lo}, {up}], {})", b.kind.symbol(), b.n, b.status)
    }
}

fn wrap(b: SNumberBound) -> PyBound {
    PyBound { inner: b }
}

/// Hilbert-curve ordering of the dyadic cubes of level `order` in `[0,1]^dim`.
#[pyclass(name = "HilbertOrdering", frozen, module = "snum")]
struct PyHilbert {
    inner: Arc<HilbertOrdering>,
}

#[pymethods]
impl PyHilbert {
    #[new]
    fn new(dim: usize, order: u32) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(hilbert::hilbert_order(dim, order).map_err(err)?) })
    }
    fn __len__(&self) -> usize {
        self.inner.len()
    }
    /// Integer coordinates of the cubes in curve order.
    fn cubes(&self) -> Vec<Vec<u32>> {
        self.inner.cubes().iter().map(|c| c.coords.clone()).collect()
    }
    fn check_face_adjacency(&self) -> bool {
        hilbert::check_face_adjacency(&self.inner).ok
    }
    fn check_prefix_nesting(&self) -> bool {
        hilbert::check_prefix_nesting(&self.inner).ok
    }
    /// Constructive John certificate of the segment domain of cubes `i..=j`
    /// (1-based), checked on `samples` curve evaluations.
    #[pyo3(signature = (i, j, samples = 10_000, seed = 0))]
    fn john_certificate<'py>(
        &self,
        py: Python<'py>,
        i: usize,
        j: usize,
        samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let omega = john::segment_domain(self.inner.clone(), i, j).map_err(err)?;
        let cert = john::john_bound_constructive(&omega).map_err(err)?;
        let ver = john::verify_john_certificate(&omega, &cert, samples, seed).map_err(err)?;
        to_py(py, &serde_json::json!({ "certificate": json_of(&cert)?, "verification": json_of(&ver)? }))
    }
}

#[pyfunction]
fn isomorphism_lower(n: usize, cells: usize) -> PyResult<PyBound> {
    Ok(wrap(sn::isomorphism_lower_1d(n, cells).map_err(err)?.0))
}

#[pyfunction]
fn approximation_upper(n: usize) -> PyResult<PyBound> {
    Ok(wrap(sn::approximation_upper(n).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, eps = "1/1000", cells = 256, seed = 0))]
fn gelfand_lower(n: usize, eps: &str, cells: usize, seed: u64) -> PyResult<PyBound> {
    let eps = Exact::parse_json(eps).ok_or_else(|| PyValueError::new_err("eps must be a rational"))?;
    let adv = sn::default_gelfand_adversaries(cells, seed);
    Ok(wrap(sn::gelfand_lower(n, &eps, &adv).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, cells = 256))]
fn kolmogorov_upper(n: usize, cells: usize) -> PyResult<PyBound> {
    Ok(wrap(sn::kolmogorov_upper_1d(n, cells).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, k_max = 10, seed = 0))]
fn kolmogorov_lower(n: usize, k_max: u32, seed: u64) -> PyResult<PyBound> {
    let adv = sn::default_kolmogorov_adversaries(seed);
    Ok(wrap(sn::kolmogorov_lower_witness(n, k_max, &adv).map_err(err)?))
}

/// Zigzag certificate for the span of mean-zero step functions given by their cell values.
#[pyfunction]
#[pyo3(signature = (cell_values, epsilon = 0.05, seed = 0))]
fn bernstein_upper(cell_values: &Bound<'_, PyList>, epsilon: f64, seed: u64) -> PyResult<PyBound> {
    let e = subspace(cell_values)?;
    let search = ZigzagSearch { epsilon, seed, ..ZigzagSearch::default() };
    Ok(wrap(sn::bernstein_upper_1d(&e, &search).map_err(err)?.0))
}

/// `inf ‖Vf‖∞` over the unit `L¹` sphere of the span.
#[pyfunction]
#[pyo3(signature = (cell_values, seed = 0))]
fn bernstein_lower(cell_values: &Bound<'_, PyList>, seed: u64) -> PyResult<PyBound> {
    let e = subspace(cell_values)?;
    Ok(wrap(sn::bernstein_lower(&e, seed).map_err(err)?.0))
}

/// Exact norm of V on mean-zero step functions with `cells` cells, as `(value, "p/q")`.
#[pyfunction]
fn operator_norm(cells: usize) -> PyResult<(f64, String)> {
    let r = volterra::operator_norm_discrete(cells).map_err(err)?;
    Ok((r.value, r.value_exact))
}

/// `‖f‖_{p,q}` of a function given as `(value, measure)` pieces.
#[pyfunction]
fn lorentz_norm(data: Vec<(f64, f64)>, p: f64, q: f64) -> PyResult<f64> {
    let params = LorentzParams::new(p, q).map_err(err)?;
    Ok(lorentz::lorentz_norm(&data, params))
}

#[pyfunction]
fn lp_norm(data: Vec<(f64, f64)>, p: f64) -> f64 {
    lorentz::lp_norm(&data, p)
}

/// Hat-function lower bound for the cube embedding with `n = m^d`.
#[pyfunction]
#[pyo3(signature = (d, m, p = None, q = 1.0, seed = 0))]
fn cube_isomorphism(d: usize, m: usize, p: Option<f64>, q: f64, seed: u64) -> PyResult<PyBound> {
    let params = LorentzParams::new(p.unwrap_or(d as f64), q).map_err(err)?;
    Ok(wrap(sn::isomorphism_lower_ddim(d, m, params, None, seed).map_err(err)?.0))
}

#[pyfunction]
fn john_constant(d: usize) -> f64 {
    john::uniform_john_constant(d)
}

/// Consistency report for a list of bounds.
#[pyfunction]
fn axiom_suite<'py>(py: Python<'py>, bounds: Vec<PyRef<'py, PyBound>>) -> PyResult<Bound<'py, PyAny>> {
    let b: Vec<SNumberBound> = bounds.iter().map(|x| x.inner.clone()).collect();
    to_py(py, &json_of(&sn::snumber_axiom_suite(&b))?)
}

/// Runs acceptance criteria (all when `criteria` is None); returns one dict per criterion.
#[pyfunction]
#[pyo3(signature = (criteria = None, seed = 2024, float_mode = false, tolerance = 1e-12))]
fn selftest<'py>(
    py: Python<'py>,
    criteria: Option<Vec<usize>>,
    seed: u64,
    float_mode: bool,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = AcceptanceConfig {
        mode: if float_mode { Mode::Float } else { Mode::Exact },
        float_tolerance: tolerance,
        seed,
        corrupt_hilbert: false,
    };
    let results = py.detach(|| match &criteria {
        Some(ids) => run_selected(&cfg, ids),
        None => run_acceptance(&cfg),
    });
    to_py(py, &json_of(&results)?)
}

#[pymodule]
fn snum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBound>()?;
    m.add_class::<PyHilbert>()?;
    m.add_function(wrap_pyfunction!(isomorphism_lower, m)?)?;
    m.add_function(wrap_pyfunction!(approximation_upper, m)?)?;
    m.add_function(wrap_pyfunction!(gelfand_lower, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_upper, m)?)?;
    m.add_function(wrap_pyfunction!(kolmogorov_lower, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_upper, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_lower, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(lorentz_norm, m)?)?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(cube_isomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(john_constant, m)?)?;
    m.add_function(wrap_pyfunction!(axiom_suite, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
