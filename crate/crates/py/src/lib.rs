//! Python bindings: `import qcx`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde::Serialize;

use qcx_core::complex::{
    check_reinhardt, levi_inertia_of, levi_matrix, qpsh_index_on_grid, tube_pseudoconvexity_check, TubeSpec,
};
use qcx_core::qconvex::{classify_on_grid, witness_search, WitnessBudget};
use qcx_core::sets::{continuity_principle_test, graph_complement_family, set_q_convex_check, GraphMap, OpenSetModel};
use qcx_core::{DomainBox, Error, GridSpec, ScalarField};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Syntax { .. }
        | Error::UnknownVariable { .. }
        | Error::Invalid(_)
        | Error::Precondition(_)
        | Error::NotSmooth(_)
        | Error::NotMember { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn bounds(dim: usize, intervals: Option<Vec<(f64, f64)>>) -> PyResult<DomainBox> {
    match intervals {
        None => Ok(DomainBox::cube(dim, -1.0, 1.0)),
        Some(iv) => {
            let b = DomainBox::new(iv).map_err(py_err)?;
            if b.dim() != dim {
                return Err(PyValueError::new_err(format!(
                    "box has {} axes, expected {dim}",
                    b.dim()
                )));
            }
            Ok(b)
        }
    }
}

fn budget(slices: usize, boundary_samples: usize, interior_samples: usize) -> WitnessBudget {
    WitnessBudget {
        slices,
        boundary_samples,
        interior_samples,
        ..WitnessBudget::default()
    }
}

/// A scalar field given by an expression in `x1..xn`, or in `x1..xn, y1..yn`
/// on C^n when `complex` is set.
#[pyclass(name = "Field", frozen)]
struct PyField {
    inner: ScalarField,
    complex: bool,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (expr, dim, complex=false, domain=None))]
    fn new(expr: &str, dim: usize, complex: bool, domain: Option<Vec<(f64, f64)>>) -> PyResult<Self> {
        let f = if complex {
            ScalarField::from_complex_expr(expr, dim)
        } else {
            ScalarField::from_expr(expr, dim)
        }
        .map_err(py_err)?;
        let f = match domain {
            Some(d) => f.with_domain(DomainBox::new(d).map_err(py_err)?).map_err(py_err)?,
            None => f,
        };
        Ok(Self { inner: f, complex })
    }

    /// Real dimension of the domain.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __call__(&self, p: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&p).map_err(|e| py_err(e.into()))
    }

    fn __repr__(&self) -> String {
        format!("Field({:?}, dim={})", self.inner.id(), self.inner.dim())
    }
}

/// An open set from its JSON description.
#[pyclass(name = "OpenSet", frozen)]
struct PyOpenSet {
    inner: OpenSetModel,
}

#[pymethods]
impl PyOpenSet {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(Self {
            inner: OpenSetModel::from_json_str(json).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        self.inner.member(&x).map_err(py_err)
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.dist_euclid(&x).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }
}

/// Grid q-index of a field: Hessian negatives, or Levi negatives for a
/// complex field.
#[pyfunction]
#[pyo3(signature = (field, r#box=None, resolution=21, tol=1e-7))]
fn classify<'py>(
    py: Python<'py>,
    field: &PyField,
    r#box: Option<Vec<(f64, f64)>>,
    resolution: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let grid = GridSpec::uniform(bounds(field.inner.dim(), r#box)?, resolution).map_err(py_err)?;
    let report = if field.complex {
        qpsh_index_on_grid(&field.inner, &grid, tol)
    } else {
        classify_on_grid(&field.inner, &grid, tol)
    }
    .map_err(py_err)?;
    to_py(py, &report)
}

/// Searches for a violation of the local maximum property at level `q`.
#[pyfunction]
#[pyo3(signature = (field, q, r#box=None, seed=0, slices=64, boundary_samples=128, interior_samples=256))]
#[allow(clippy::too_many_arguments)]
fn witness<'py>(
    py: Python<'py>,
    field: &PyField,
    q: usize,
    r#box: Option<Vec<(f64, f64)>>,
    seed: u64,
    slices: usize,
    boundary_samples: usize,
    interior_samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let b = bounds(field.inner.dim(), r#box)?;
    let out = witness_search(
        &field.inner,
        q,
        &b,
        &budget(slices, boundary_samples, interior_samples),
        seed,
    )
    .map_err(py_err)?;
    to_py(py, &out)
}

/// Witness search on `-ln d(x, boundary)`.
#[pyfunction]
#[pyo3(signature = (set, q, r#box=None, seed=0, slices=64, boundary_samples=128, interior_samples=256))]
#[allow(clippy::too_many_arguments)]
fn set_check<'py>(
    py: Python<'py>,
    set: &PyOpenSet,
    q: usize,
    r#box: Option<Vec<(f64, f64)>>,
    seed: u64,
    slices: usize,
    boundary_samples: usize,
    interior_samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let n = set.inner.dim();
    let b = match r#box {
        Some(_) => bounds(n, r#box)?,
        None => set
            .inner
            .bbox()
            .intersect(&DomainBox::cube(n, -1.0, 1.0))
            .ok_or_else(|| PyValueError::new_err("set misses [-1,1]^n; pass a box"))?,
    };
    let r = set_q_convex_check(
        &set.inner,
        q,
        &b,
        &budget(slices, boundary_samples, interior_samples),
        seed,
    )
    .map_err(py_err)?;
    to_py(py, &r)
}

/// Levi matrix at `z` as `(real parts, imaginary parts, negatives)`.
#[pyfunction]
#[pyo3(signature = (field, z, tol=1e-7))]
fn levi(field: &PyField, z: Vec<f64>, tol: f64) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>, usize)> {
    let est = levi_matrix(&field.inner, &z).map_err(py_err)?;
    let m = &est.matrix;
    let n = m.order();
    let re = (0..n).map(|k| (0..n).map(|l| m.get(k, l).re).collect()).collect();
    let im = (0..n).map(|k| (0..n).map(|l| m.get(k, l).im).collect()).collect();
    let negatives = levi_inertia_of(m, tol).map_err(py_err)?.negatives;
    Ok((re, im, negatives))
}

/// Levi criterion on the tube over `set` with imaginary half-width `a`.
#[pyfunction]
#[pyo3(signature = (set, q, a=f64::INFINITY, r#box=None, resolution=7, seed=0))]
fn tube<'py>(
    py: Python<'py>,
    set: &PyOpenSet,
    q: usize,
    a: f64,
    r#box: Option<Vec<(f64, f64)>>,
    resolution: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let n = set.inner.dim();
    let base = match r#box {
        Some(_) => bounds(n, r#box)?,
        None => set
            .inner
            .bbox()
            .intersect(&DomainBox::cube(n, -1.0, 1.0))
            .ok_or_else(|| PyValueError::new_err("set misses [-1,1]^n; pass a box"))?,
    };
    let w = 0.9 * a.min(1.0);
    let grid = GridSpec::uniform(base.product(&DomainBox::cube(n, -w, w)), resolution).map_err(py_err)?;
    let t = TubeSpec::new(set.inner.clone(), a).map_err(py_err)?;
    let r = tube_pseudoconvexity_check(&t, q, &grid, 1e-7, &base, &WitnessBudget::default(), seed).map_err(py_err)?;
    to_py(py, &r)
}

/// Compares `u` with its pullback `z -> u(ln|z1|, ..)` on a grid in R^{2n}.
#[pyfunction]
#[pyo3(signature = (field, r#box=None, resolution=21, tol=1e-7))]
fn reinhardt<'py>(
    py: Python<'py>,
    field: &PyField,
    r#box: Option<Vec<(f64, f64)>>,
    resolution: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let n = field.inner.dim();
    let b = match r#box {
        Some(_) => bounds(2 * n, r#box)?,
        None => DomainBox::cube(2 * n, -2.0, 2.0),
    };
    let grid = GridSpec::uniform(b, resolution).map_err(py_err)?;
    to_py(py, &check_reinhardt(&field.inner, &grid, tol).map_err(py_err)?)
}

/// Continuity principle on the complement of the graph of `f` along the
/// chord from `x1` to `x2`, touching the graph at chord parameter `t0`.
#[pyfunction]
#[pyo3(signature = (f, x1, x2, t0=0.0, t_steps=32, s_steps=41))]
fn graph_demo<'py>(
    py: Python<'py>,
    f: &Bound<'py, PyList>,
    x1: Vec<f64>,
    x2: Vec<f64>,
    t0: f64,
    t_steps: usize,
    s_steps: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let sources: Vec<String> = f.extract()?;
    let refs: Vec<&str> = sources.iter().map(String::as_str).collect();
    let map = GraphMap::parse(x1.len(), &refs).map_err(py_err)?;
    let fam = graph_complement_family(&map, &x1, &x2, t0).map_err(py_err)?;
    let set = OpenSetModel::GraphComplement(map);
    to_py(
        py,
        &continuity_principle_test(&set, &fam, t_steps, s_steps).map_err(py_err)?,
    )
}

#[pymodule]
fn qcx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyOpenSet>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(set_check, m)?)?;
    m.add_function(wrap_pyfunction!(levi, m)?)?;
    m.add_function(wrap_pyfunction!(tube, m)?)?;
    m.add_function(wrap_pyfunction!(reinhardt, m)?)?;
    m.add_function(wrap_pyfunction!(graph_demo, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
