//! Python bindings. The compiled library is importable as `minorlab`.

use minorlab::poset::{build_preorder, export_dot, MinorPoset, Strategy, Universe};
use minorlab::{
    c_degree, canonicalize, downset_representatives, minimal_decomposition, Budget, CloneLimits, Domain,
    DownsetConfig, Error, MeetClone, Operation, SemilatticeStructure, TermVector,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(minorlab, ResourceLimitError, PyException);

/// Inner operations and the outer operation of a decomposition.
type PyDecomposition = (Vec<PyOperation>, PyOperation);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::ResourceLimit { .. } => ResourceLimitError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A finitary operation on `{0, ..., k-1}` given by its row-major table.
#[pyclass(name = "Operation", module = "minorlab", frozen, eq, ord, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyOperation(Operation);

#[pymethods]
impl PyOperation {
    #[new]
    fn new(domain: usize, arity: usize, table: Vec<u8>) -> PyResult<Self> {
        let domain = Domain::new(domain).map_err(to_py)?;
        Operation::new(domain, arity, table).map(PyOperation).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str::<Operation>(text).map(PyOperation).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// The projection onto the 1-based coordinate `index`.
    #[staticmethod]
    fn projection(domain: usize, arity: usize, index: usize) -> PyResult<Self> {
        let domain = Domain::new(domain).map_err(to_py)?;
        Operation::projection(domain, arity, index).map(PyOperation).map_err(to_py)
    }

    #[staticmethod]
    fn constant(domain: usize, arity: usize, value: u8) -> PyResult<Self> {
        let domain = Domain::new(domain).map_err(to_py)?;
        Operation::constant(domain, arity, value).map(PyOperation).map_err(to_py)
    }

    #[getter]
    fn domain(&self) -> usize {
        self.0.domain().size()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn table(&self) -> Vec<u8> {
        self.0.table().to_vec()
    }

    fn __call__(&self, args: Vec<u8>) -> PyResult<u8> {
        self.0.eval(&args).map_err(to_py)
    }

    fn compose(&self, inner: Vec<PyOperation>) -> PyResult<PyOperation> {
        let inner: Vec<Operation> = inner.into_iter().map(|op| op.0).collect();
        self.0.compose(&inner).map(PyOperation).map_err(to_py)
    }

    fn essential_variables(&self) -> Vec<usize> {
        self.0.essential_variables()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("operations serialize")
    }

    fn __repr__(&self) -> String {
        format!("Operation({})", self.0)
    }
}

/// A meet-semilattice on a finite domain.
#[pyclass(name = "Semilattice", module = "minorlab", frozen, from_py_object)]
#[derive(Clone)]
struct PySemilattice(SemilatticeStructure);

#[pymethods]
impl PySemilattice {
    #[new]
    fn new(meet: PyOperation) -> PyResult<Self> {
        SemilatticeStructure::new(meet.0).map(PySemilattice).map_err(to_py)
    }

    #[staticmethod]
    fn chain(size: usize) -> PyResult<Self> {
        SemilatticeStructure::chain(size).map(PySemilattice).map_err(to_py)
    }

    #[staticmethod]
    fn boolean() -> Self {
        PySemilattice(SemilatticeStructure::boolean())
    }

    #[getter]
    fn domain(&self) -> usize {
        self.0.domain().size()
    }

    #[getter]
    fn zero(&self) -> Option<u8> {
        self.0.zero()
    }

    #[getter]
    fn identity(&self) -> Option<u8> {
        self.0.identity()
    }

    fn meet(&self, a: u8, b: u8) -> u8 {
        self.0.meet(a, b)
    }
}

/// A clone generated by the meet and optionally the zero and identity constants.
#[pyclass(name = "MeetClone", module = "minorlab", frozen)]
struct PyMeetClone(MeetClone);

#[pymethods]
impl PyMeetClone {
    #[new]
    #[pyo3(signature = (semilattice, zero=false, identity=false))]
    fn new(semilattice: &PySemilattice, zero: bool, identity: bool) -> PyResult<Self> {
        MeetClone::new(semilattice.0.clone(), zero, identity).map(PyMeetClone).map_err(to_py)
    }

    /// One of `meet`, `meet0`, `meet1`, `meet01`.
    #[staticmethod]
    fn preset(name: &str, semilattice: &PySemilattice) -> PyResult<Self> {
        MeetClone::preset(name, semilattice.0.clone()).map(PyMeetClone).map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    /// Inner terms `t` with `f = g(t)`, or `None` when `f` is not a minor of `g`.
    #[pyo3(signature = (f, g, budget=Budget::DEFAULT_LIMIT))]
    fn find_minor(&self, py: Python<'_>, f: &PyOperation, g: &PyOperation, budget: u64) -> PyResult<Option<Vec<String>>> {
        let mut budget = Budget::new(budget);
        let witness = py.detach(|| self.0.find_minor(&f.0, &g.0, &mut budget)).map_err(to_py)?;
        Ok(witness.map(|w| w.terms.iter().map(ToString::to_string).collect()))
    }

    #[pyo3(signature = (f, g, budget=Budget::DEFAULT_LIMIT))]
    fn equivalent(&self, py: Python<'_>, f: &PyOperation, g: &PyOperation, budget: u64) -> PyResult<bool> {
        let mut budget = Budget::new(budget);
        py.detach(|| self.0.equivalent(&f.0, &g.0, &mut budget)).map_err(to_py)
    }

    /// The least `m` such that `f` factors through `m` clone members, with one
    /// minimal decomposition as `(inner, outer)` when `m > 0`.
    #[pyo3(signature = (f, budget=Budget::DEFAULT_LIMIT))]
    fn degree(
        &self,
        py: Python<'_>,
        f: &PyOperation,
        budget: u64,
    ) -> PyResult<(usize, Option<PyDecomposition>)> {
        py.detach(|| {
            let table = self.0.table(f.0.arity(), CloneLimits::default())?;
            let mut budget = Budget::new(budget);
            let degree = c_degree(&f.0, &table, &mut budget)?;
            if degree == 0 {
                return Ok((0, None));
            }
            let d = minimal_decomposition(&f.0, &table, &mut budget)?;
            let inner = d.inner.into_iter().map(PyOperation).collect();
            Ok((degree, Some((inner, PyOperation(d.outer)))))
        })
        .map_err(to_py)
    }

    /// One representative per equivalence class below `f`.
    #[pyo3(signature = (f, e_cap=4096))]
    fn downset(&self, py: Python<'_>, f: &PyOperation, e_cap: usize) -> PyResult<Vec<PyOperation>> {
        let config = DownsetConfig { e_cap, ..DownsetConfig::default() };
        let ds = py.detach(|| downset_representatives(&f.0, &self.0, config)).map_err(to_py)?;
        Ok(ds.classes().iter().map(|c| PyOperation(c.representative.clone())).collect())
    }

    /// Builds the minor poset of all operations with the given arities.
    #[pyo3(signature = (arities, fast=false, budget=Budget::DEFAULT_LIMIT))]
    fn poset(&self, py: Python<'_>, arities: Vec<usize>, fast: bool, budget: u64) -> PyResult<PyPoset> {
        let family = self.0.clone();
        py.detach(move || {
            let universe = Universe::all(family.semilattice().domain(), &arities)?;
            let table = family.table(universe.max_arity(), CloneLimits::default())?;
            let strategy = if fast { Strategy::SemilatticeFast } else { Strategy::Generic };
            let poset = build_preorder(&universe, &table, strategy, budget)?;
            Ok(PyPoset { poset, family })
        })
        .map_err(to_py)
    }
}

/// Equivalence classes of a universe ordered by the minor relation.
#[pyclass(name = "Poset", module = "minorlab", frozen)]
struct PyPoset {
    poset: MinorPoset,
    family: MeetClone,
}

#[pymethods]
impl PyPoset {
    fn __len__(&self) -> usize {
        self.poset.classes().len()
    }

    fn representatives(&self) -> Vec<PyOperation> {
        (0..self.poset.classes().len()).map(|c| PyOperation(self.poset.representative(c).clone())).collect()
    }

    fn members(&self, class: usize) -> PyResult<Vec<PyOperation>> {
        let c = self.poset.classes().get(class).ok_or_else(|| to_py(Error::UnknownClass(class)))?;
        Ok(c.members.iter().map(|&i| PyOperation(self.poset.operations()[i].clone())).collect())
    }

    /// Covering pairs `(lower, upper)` of class ids.
    fn hasse(&self) -> Vec<(usize, usize)> {
        self.poset.hasse().to_vec()
    }

    fn le(&self, lower: usize, upper: usize) -> bool {
        self.poset.le(lower, upper)
    }

    fn to_dot(&self) -> String {
        export_dot(&self.poset, Some(&self.family))
    }

    fn to_json(&self) -> String {
        self.poset.to_json()
    }
}

/// Canonical form of `g(terms)`, where `terms[j]` lists the 1-based
/// variables of the `j`-th meet term over `n` variables.
#[pyfunction(name = "canonicalize")]
fn py_canonicalize<'py>(
    py: Python<'py>,
    g: &PyOperation,
    n: usize,
    terms: Vec<Vec<usize>>,
    semilattice: &PySemilattice,
) -> PyResult<Bound<'py, PyDict>> {
    let refs: Vec<&[usize]> = terms.iter().map(Vec::as_slice).collect();
    let tv = TermVector::from_sets(n, &refs).map_err(to_py)?;
    let c = canonicalize(&g.0, &tv, &semilattice.0).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("system", c.system.member_sets())?;
    out.set_item("psi", c.psi.terms().iter().map(ToString::to_string).collect::<Vec<_>>())?;
    out.set_item("pi", c.witness.pi)?;
    out.set_item("xi", c.witness.xi.iter().map(ToString::to_string).collect::<Vec<_>>())?;
    out.set_item("f", PyOperation(c.f))?;
    out.set_item("f_prime", PyOperation(c.f_prime))?;
    Ok(out)
}

#[pymodule(name = "minorlab")]
fn minorlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperation>()?;
    m.add_class::<PySemilattice>()?;
    m.add_class::<PyMeetClone>()?;
    m.add_class::<PyPoset>()?;
    m.add_function(wrap_pyfunction!(py_canonicalize, m)?)?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    Ok(())
}
