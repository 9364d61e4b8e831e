//! Python module `arbor_py`. Reports and traces cross the boundary as JSON
//! strings; polynomials, square classes and supernatural numbers as objects.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use arbor_core::arboreal;
use arbor_core::construct::{self, ConstructionTrace, RunParams};
use arbor_core::exactpoly::{discriminant, format_rational, parse_rational, RatPoly};
use arbor_core::sqclass::{ClassSubspace, SquareClass};
use arbor_core::supernat::SupernaturalNumber;
use arbor_core::{treegroup, Error};

fn py_err(e: impl Into<Error>) -> PyErr {
    let e = e.into();
    if e.is_exhaustion() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rational(s: &str) -> PyResult<num_rational::BigRational> {
    parse_rational(s.trim()).ok_or_else(|| PyValueError::new_err(format!("not a rational number: {s:?}")))
}

fn json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializes")
}

#[pyclass(name = "Poly", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPoly(RatPoly);

#[pymethods]
impl PyPoly {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyPoly).map_err(|e| PyValueError::new_err(format!("{e}")))
    }

    fn degree(&self) -> Option<usize> {
        self.0.degree()
    }

    /// Value at a rational given as text, returned as text.
    fn eval(&self, at: &str) -> PyResult<String> {
        Ok(format_rational(&self.0.eval(&rational(at)?)))
    }

    fn iterate(&self, n: usize) -> PyResult<Self> {
        self.0.iterate(n).map(PyPoly).map_err(py_err)
    }

    fn discriminant(&self) -> PyResult<String> {
        discriminant(&self.0).map(|d| format_rational(&d)).map_err(py_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({:?})", self.0.to_string())
    }
}

#[pyclass(name = "SquareClass", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySquareClass(SquareClass);

#[pymethods]
impl PySquareClass {
    /// Class of a nonzero integer modulo squares.
    #[new]
    fn new(n: BigInt) -> PyResult<Self> {
        SquareClass::of_integer(&n).map(PySquareClass).map_err(py_err)
    }

    /// Class of a nonzero rational given as text.
    #[staticmethod]
    fn of_rational(q: &str) -> PyResult<Self> {
        SquareClass::of_rational(&rational(q)?).map(PySquareClass).map_err(py_err)
    }

    #[getter]
    fn kernel(&self) -> BigInt {
        self.0.kernel()
    }

    fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    fn __mul__(&self, other: &Self) -> Self {
        PySquareClass(self.0.mul(&other.0))
    }

    fn __repr__(&self) -> String {
        format!("SquareClass({})", self.0.kernel())
    }
}

#[pyclass(name = "ClassSubspace", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyClassSubspace(ClassSubspace);

#[pymethods]
impl PyClassSubspace {
    /// Span of the classes of the given nonzero integers.
    #[new]
    fn new(generators: Vec<BigInt>) -> PyResult<Self> {
        let classes = generators.iter().map(SquareClass::of_integer).collect::<Result<Vec<_>, _>>().map_err(py_err)?;
        Ok(PyClassSubspace(ClassSubspace::span(&classes)))
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn kernels(&self) -> Vec<BigInt> {
        self.0.kernels()
    }

    fn contains(&self, class: &PySquareClass) -> bool {
        self.0.member(&class.0)
    }

    fn compositum(&self, other: &Self) -> Self {
        PyClassSubspace(self.0.compositum(&other.0))
    }

    fn intersection(&self, other: &Self) -> Self {
        PyClassSubspace(self.0.intersection(&other.0))
    }

    fn __repr__(&self) -> String {
        format!("ClassSubspace({:?})", self.0.kernels().iter().map(BigInt::to_string).collect::<Vec<_>>())
    }
}

#[pyclass(name = "Supernatural", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySupernatural(SupernaturalNumber);

#[pymethods]
impl PySupernatural {
    /// Parses text such as `"2^inf * 3^2"` or `"12"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PySupernatural).map_err(py_err)
    }

    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn divides(&self, other: &Self) -> bool {
        self.0.divides(&other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PySupernatural(self.0.mul(&other.0))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Supernatural({:?})", self.0.to_string())
    }
}

#[pyclass(name = "Trace", frozen)]
struct PyTrace(ConstructionTrace);

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ConstructionTrace::from_json_str(text).map(PyTrace).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn steps(&self) -> usize {
        self.0.steps.len()
    }

    fn field(&self) -> PyClassSubspace {
        PyClassSubspace(self.0.final_record.field.clone())
    }

    fn degree(&self) -> PySupernatural {
        PySupernatural(self.0.final_record.supernatural_degree.clone())
    }

    /// Violations as a JSON list; empty for a valid trace.
    fn verify(&self) -> PyResult<String> {
        construct::verify_trace(&self.0).map(|v| json(&v)).map_err(py_err)
    }

    #[pyo3(signature = (level, polys = Vec::new()))]
    fn audit(&self, level: usize, polys: Vec<PyPoly>) -> PyResult<String> {
        let polys: Vec<RatPoly> = polys.into_iter().map(|p| p.0).collect();
        construct::counterexample_audit(&self.0, &polys, level).map(|r| json(&r)).map_err(py_err)
    }
}

/// Runs the construction; exhausted bounds raise `RuntimeError`.
#[pyfunction]
#[pyo3(signature = (steps = 10, depth = 5, height = 1000))]
fn simulate(steps: usize, depth: usize, height: u64) -> PyResult<PyTrace> {
    construct::run(&RunParams { steps, depth, height }).map(PyTrace).map_err(|f| py_err(f.error))
}

/// Kernels of disc(f), disc(f∘f), … up to `levels`.
#[pyfunction]
fn disc_classes(poly: &PyPoly, levels: usize) -> PyResult<Vec<BigInt>> {
    let seq = arboreal::disc_class_sequence(&poly.0, levels).map_err(py_err)?;
    Ok(seq.classes().iter().map(SquareClass::kernel).collect())
}

/// Index certificate as JSON.
#[pyfunction]
#[pyo3(signature = (poly, base, level, n, primes = 20))]
fn index_report(poly: &PyPoly, base: &PyClassSubspace, level: usize, n: u64, primes: usize) -> PyResult<String> {
    arboreal::index_report(&poly.0, &base.0, level, n, primes).map(|c| json(&c)).map_err(py_err)
}

/// |Aut T_k(d)|.
#[pyfunction]
fn group_order(d: usize, k: usize) -> BigInt {
    treegroup::group_order(d, k).into()
}

#[pymodule]
fn arbor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PySquareClass>()?;
    m.add_class::<PyClassSubspace>()?;
    m.add_class::<PySupernatural>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(disc_classes, m)?)?;
    m.add_function(wrap_pyfunction!(index_report, m)?)?;
    m.add_function(wrap_pyfunction!(group_order, m)?)?;
    Ok(())
}
