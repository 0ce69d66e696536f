use std::path::PathBuf;

use kslat::cli;
use kslat::document::{self, ToleranceOverrides};
use kslat::linalg::{ComplexMatrix, StateVector, C64};
use kslat::{burnside, lattice, valuation, ContextCollection, Projector, Subspace, Tolerance};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

fn err(e: kslat::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn matrix_from_rows(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    Ok(ComplexMatrix::from_row_slice(n, cols, &flat))
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn tolerance(tol: Option<&PyTolerance>) -> Tolerance {
    tol.map(|t| t.inner).unwrap_or_default()
}

#[pyclass(name = "Tolerance", frozen, from_py_object)]
#[derive(Clone)]
struct PyTolerance {
    inner: Tolerance,
}

#[pymethods]
impl PyTolerance {
    #[new]
    #[pyo3(signature = (eps_rank=1e-10, eps_entry=1e-9, eps_subspace=1e-8))]
    fn new(eps_rank: f64, eps_entry: f64, eps_subspace: f64) -> PyResult<Self> {
        let inner = Tolerance::new(eps_rank, eps_entry, eps_subspace).map_err(err)?;
        Ok(PyTolerance { inner })
    }

    #[getter]
    fn eps_rank(&self) -> f64 {
        self.inner.eps_rank
    }

    #[getter]
    fn eps_entry(&self) -> f64 {
        self.inner.eps_entry
    }

    #[getter]
    fn eps_subspace(&self) -> f64 {
        self.inner.eps_subspace
    }
}

#[pyclass(name = "Subspace", frozen)]
struct PySubspace {
    inner: Subspace,
}

#[pymethods]
impl PySubspace {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn basis(&self) -> Vec<Vec<C64>> {
        self.inner.basis().iter().map(|v| v.iter().copied().collect()).collect()
    }

    fn projector(&self) -> Vec<Vec<C64>> {
        matrix_to_rows(self.inner.projector())
    }

    #[pyo3(signature = (other, tol=None))]
    fn equals(&self, other: &PySubspace, tol: Option<&PyTolerance>) -> PyResult<bool> {
        self.inner.equals(&other.inner, &tolerance(tol)).map_err(err)
    }

    #[pyo3(signature = (other, tol=None))]
    fn meet(&self, other: &PySubspace, tol: Option<&PyTolerance>) -> PyResult<PySubspace> {
        let inner = self.inner.meet(&other.inner, &tolerance(tol)).map_err(err)?;
        Ok(PySubspace { inner })
    }

    #[pyo3(signature = (other, tol=None))]
    fn join(&self, other: &PySubspace, tol: Option<&PyTolerance>) -> PyResult<PySubspace> {
        let inner = self.inner.join(&other.inner, &tolerance(tol)).map_err(err)?;
        Ok(PySubspace { inner })
    }

    #[pyo3(signature = (tol=None))]
    fn ortho_complement(&self, tol: Option<&PyTolerance>) -> PySubspace {
        PySubspace {
            inner: self.inner.ortho_complement(&tolerance(tol)),
        }
    }

    fn __repr__(&self) -> String {
        format!("Subspace({})", self.inner)
    }
}

/// Subspace spanned by the given vectors.
#[pyfunction]
#[pyo3(signature = (ambient_dim, vectors, tol=None))]
fn span(ambient_dim: usize, vectors: Vec<Vec<C64>>, tol: Option<&PyTolerance>) -> PyResult<PySubspace> {
    let vectors: Vec<StateVector> = vectors.into_iter().map(StateVector::from_vec).collect();
    let inner = Subspace::from_span(ambient_dim, &vectors, &tolerance(tol)).map_err(err)?;
    Ok(PySubspace { inner })
}

#[pyclass(name = "Projector", frozen)]
struct PyProjector {
    inner: Projector,
    tol: Tolerance,
}

#[pymethods]
impl PyProjector {
    #[new]
    #[pyo3(signature = (matrix, label="P", tol=None))]
    fn new(matrix: Vec<Vec<C64>>, label: &str, tol: Option<&PyTolerance>) -> PyResult<Self> {
        let tol = tolerance(tol);
        let inner = Projector::validate(matrix_from_rows(matrix)?, label, &tol).map_err(err)?;
        Ok(PyProjector { inner, tol })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        matrix_to_rows(self.inner.matrix())
    }

    fn ran(&self) -> PySubspace {
        PySubspace {
            inner: self.inner.ran(&self.tol),
        }
    }

    fn ker(&self) -> PySubspace {
        PySubspace {
            inner: self.inner.ker(&self.tol),
        }
    }

    /// `[(label, Subspace), ...]` for `{0}, ran, ker, H`.
    fn lattice(&self) -> Vec<(String, PySubspace)> {
        family(&lattice::lat_single(&self.inner, &self.tol))
    }

    fn valuate(&self, state: Vec<C64>) -> PyResult<String> {
        let v = valuation::valuate(&StateVector::from_vec(state), &self.inner, &self.tol).map_err(err)?;
        Ok(v.to_string())
    }

    fn is_invariant(&self, subspace: &PySubspace) -> PyResult<bool> {
        kslat::projector::is_invariant(&subspace.inner, &self.inner, &self.tol).map_err(err)
    }
}

fn family(f: &lattice::LatticeFamily) -> Vec<(String, PySubspace)> {
    f.iter()
        .map(|(u, label)| (label.to_string(), PySubspace { inner: u.clone() }))
        .collect()
}

#[pyclass(name = "ContextCollection", frozen)]
struct PyCollection {
    inner: ContextCollection,
    tol: Tolerance,
}

#[pymethods]
impl PyCollection {
    /// The three Pauli eigenbasis contexts `z`, `x`, `y`.
    #[staticmethod]
    fn pauli() -> Self {
        PyCollection {
            inner: kslat::pauli_contexts(),
            tol: Tolerance::default(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, tol) = document::ingest_str(text, &ToleranceOverrides::default()).map_err(err)?;
        Ok(PyCollection { inner, tol })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (inner, tol) = document::ingest(&path, &ToleranceOverrides::default()).map_err(err)?;
        Ok(PyCollection { inner, tol })
    }

    fn to_json(&self) -> String {
        document::emit(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn context_ids(&self) -> Vec<String> {
        self.inner.contexts().iter().map(|c| c.id().to_string()).collect()
    }

    fn lattice(&self, context: &str) -> PyResult<Vec<(String, PySubspace)>> {
        let ctx = self.inner.context(context).map_err(err)?;
        Ok(family(&lattice::lat_context(ctx, &self.tol).map_err(err)?))
    }

    fn intersection(&self) -> PyResult<Vec<(String, PySubspace)>> {
        let fams = self
            .inner
            .contexts()
            .iter()
            .map(|c| lattice::lat_context(c, &self.tol))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(family(&lattice::lat_intersect(&fams, &self.tol).map_err(err)?))
    }

    fn irreducibility<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = cli::irreducible_report(&self.inner, &self.tol).map_err(err)?;
        to_py(py, &report.verdicts)
    }

    fn valuate<'py>(&self, py: Python<'py>, state: Vec<C64>) -> PyResult<Bound<'py, PyAny>> {
        let report = cli::valuate_report(&self.inner, &self.tol, &StateVector::from_vec(state)).map_err(err)?;
        to_py(py, &report.verdicts)
    }

    fn ks_search<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let report = cli::ks_search_report(&self.inner, &self.tol).map_err(err)?;
        to_py(py, &report.verdicts)
    }
}

/// Dimension of the unital algebra generated by the matrices.
#[pyfunction]
#[pyo3(signature = (generators, tol=None))]
fn algebra_dimension(generators: Vec<Vec<Vec<C64>>>, tol: Option<&PyTolerance>) -> PyResult<usize> {
    let gens = generators.into_iter().map(matrix_from_rows).collect::<PyResult<Vec<_>>>()?;
    Ok(burnside::algebra_closure(&gens, &tolerance(tol)).map_err(err)?.dimension)
}

/// `(irreducible, algebra_dimension, witness_or_None)`.
#[pyfunction]
#[pyo3(signature = (generators, tol=None))]
fn is_irreducible(
    generators: Vec<Vec<Vec<C64>>>,
    tol: Option<&PyTolerance>,
) -> PyResult<(bool, usize, Option<PySubspace>)> {
    let gens = generators.into_iter().map(matrix_from_rows).collect::<PyResult<Vec<_>>>()?;
    let r = burnside::is_irreducible(&gens, &tolerance(tol)).map_err(err)?;
    Ok((
        r.irreducible,
        r.algebra_dimension,
        r.witness.map(|inner| PySubspace { inner }),
    ))
}

/// Runs the command-line front end in-process; returns `(exit_code, output)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (u8, String) {
    let outcome = cli::run(std::iter::once("kslat".to_string()).chain(args));
    (outcome.exit_code, outcome.output)
}

#[pymodule]
fn pykslat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTolerance>()?;
    m.add_class::<PySubspace>()?;
    m.add_class::<PyProjector>()?;
    m.add_class::<PyCollection>()?;
    m.add_function(wrap_pyfunction!(span, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(is_irreducible, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
