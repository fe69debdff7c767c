//! Python bindings: rings, their commutation graphs and the verifier.

use std::sync::Arc;

use ccgraph::analytics::{class_diameter, distance, ring_diameter, ring_girth};
use ccgraph::export::{self, ExportFormat};
use ccgraph::identities::verify_free_algebra_chain;
use ccgraph::linalg;
use ccgraph::ring::{BuildOptions, ElementId, RingHandle};
use ccgraph::verify::DEFAULT_SEED;
use ccgraph::{build_commutation_graph_with, parse_ring_spec, CommutationGraph, Error, GraphOptions};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// An element given as an integer id or as a literal such as `"[[0,1],[0,0]]"`.
#[derive(FromPyObject)]
enum Element {
    Id(u64),
    Literal(String),
}

impl Element {
    fn resolve(&self, ring: &RingHandle) -> PyResult<ElementId> {
        match self {
            Element::Id(id) => ring.parse_element(&id.to_string()),
            Element::Literal(s) => ring.parse_element(s),
        }
        .map_err(to_py)
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Ring", module = "pyccgraph", frozen)]
struct PyRing {
    inner: Arc<RingHandle>,
}

#[pymethods]
impl PyRing {
    #[new]
    #[pyo3(signature = (spec, allow_large = false))]
    fn new(spec: &str, allow_large: bool) -> PyResult<Self> {
        let desc = parse_ring_spec(spec).map_err(to_py)?;
        let ring = RingHandle::build_with(&desc, BuildOptions { allow_large, ..Default::default() }).map_err(to_py)?;
        Ok(PyRing { inner: Arc::new(ring) })
    }

    #[getter]
    fn spec(&self) -> String {
        self.inner.spec()
    }

    fn __len__(&self) -> usize {
        self.inner.size() as usize
    }

    fn __repr__(&self) -> String {
        format!("Ring('{}')", self.inner.spec())
    }

    fn element(&self, a: Element) -> PyResult<u32> {
        Ok(a.resolve(&self.inner)?.0)
    }

    fn render(&self, a: Element) -> PyResult<String> {
        Ok(self.inner.render(a.resolve(&self.inner)?))
    }

    fn mul(&self, a: Element, b: Element) -> PyResult<u32> {
        Ok(self.inner.mul(a.resolve(&self.inner)?, b.resolve(&self.inner)?).0)
    }

    fn add(&self, a: Element, b: Element) -> PyResult<u32> {
        Ok(self.inner.add(a.resolve(&self.inner)?, b.resolve(&self.inner)?).0)
    }

    fn is_unit(&self, a: Element) -> PyResult<bool> {
        Ok(self.inner.is_unit(a.resolve(&self.inner)?))
    }

    fn is_nilpotent(&self, a: Element) -> PyResult<bool> {
        Ok(self.inner.is_nilpotent(a.resolve(&self.inner)?))
    }

    /// Builds the commutation graph. Releases the GIL while sweeping.
    #[pyo3(signature = (threads = None))]
    fn graph(&self, py: Python<'_>, threads: Option<usize>) -> PyResult<PyGraph> {
        let ring = self.inner.clone();
        let opts = GraphOptions { threads, allow_large: true };
        let graph = py.detach(|| build_commutation_graph_with(&ring, opts)).map_err(to_py)?;
        Ok(PyGraph { ring, graph })
    }
}

#[pyclass(name = "Graph", module = "pyccgraph", frozen)]
struct PyGraph {
    ring: Arc<RingHandle>,
    graph: CommutationGraph,
}

#[pymethods]
impl PyGraph {
    #[getter]
    fn vertex_count(&self) -> u32 {
        self.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> u64 {
        self.graph.edge_count()
    }

    #[getter]
    fn component_count(&self) -> usize {
        self.graph.component_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph('{}', vertices={}, edges={})",
            self.ring.spec(),
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
    }

    fn neighbors(&self, a: Element) -> PyResult<Vec<u32>> {
        Ok(self.graph.neighbors(a.resolve(&self.ring)?).to_vec())
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.graph.edges().collect()
    }

    fn components(&self) -> Vec<Vec<u32>> {
        self.graph.components().map(<[u32]>::to_vec).collect()
    }

    /// `{member: level}` for the closure of one element.
    fn closure<'py>(&self, py: Python<'py>, a: Element) -> PyResult<Bound<'py, PyDict>> {
        let c = self.graph.closure(&[a.resolve(&self.ring)?]).map_err(to_py)?;
        let out = PyDict::new(py);
        for (m, level) in c.members.iter().zip(&c.levels) {
            out.set_item(m.0, level)?;
        }
        Ok(out)
    }

    /// `None` across classes.
    fn distance(&self, a: Element, b: Element) -> PyResult<Option<u32>> {
        Ok(distance(&self.graph, a.resolve(&self.ring)?, b.resolve(&self.ring)?).finite())
    }

    fn diameter(&self, py: Python<'_>) -> u32 {
        py.detach(|| ring_diameter(&self.graph))
    }

    fn class_diameter(&self, a: Element) -> PyResult<u32> {
        Ok(class_diameter(&self.graph, a.resolve(&self.ring)?))
    }

    /// `None` when acyclic.
    fn girth(&self, py: Python<'_>) -> Option<u32> {
        py.detach(|| ring_girth(&self.graph).finite())
    }

    #[pyo3(signature = (format = "dot"))]
    fn export(&self, format: &str) -> PyResult<String> {
        let format: ExportFormat = format.parse().map_err(to_py)?;
        export::render(&self.ring, &self.graph, format).map_err(to_py)
    }
}

/// Runs a verification suite; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, rings = None, seed = DEFAULT_SEED))]
fn run_suite<'py>(py: Python<'py>, suite: &str, rings: Option<Vec<String>>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let rings = rings.unwrap_or_default();
    let report = py.detach(|| ccgraph::verify::run_suite(suite, &rings, seed)).map_err(to_py)?;
    json_to_py(py, &report.to_json())
}

/// The `l` factorization steps as `(left, factor, right)` strings.
#[pyfunction]
fn free_algebra_chain(l: usize) -> PyResult<Vec<(String, String, String)>> {
    let steps = verify_free_algebra_chain(l).map_err(to_py)?;
    Ok(steps.into_iter().map(|s| (s.left.to_string(), s.factor.to_string(), s.right.to_string())).collect())
}

/// Jordan partition of the nilpotent part, characteristic polynomial and
/// Fitting split of a matrix element.
#[pyfunction]
fn jordan<'py>(py: Python<'py>, ring: &PyRing, element: Element) -> PyResult<Bound<'py, PyDict>> {
    let r = &ring.inner;
    let a = element.resolve(r)?;
    let (n, field) =
        r.matrix_shape().ok_or_else(|| PyValueError::new_err(format!("{} is not a matrix ring", r.spec())))?;
    let m = r.decode_matrix(a).map_err(to_py)?;
    let fitting = linalg::fitting_decomposition(field, &m);
    let nil = &fitting.nilpotent_part;
    let blocks = if nil.size == 0 { Vec::new() } else { linalg::jordan_partition(field, nil).map_err(to_py)?.blocks };
    let out = PyDict::new(py);
    out.set_item("char_poly", linalg::char_poly(field, &m).render(field))?;
    out.set_item("rank", linalg::rank(field, &m))?;
    out.set_item("nilpotency_index", linalg::nilpotency_index(field, &m))?;
    out.set_item("jordan_partition", PyList::new(py, blocks)?)?;
    out.set_item("invertible_size", fitting.invertible_size())?;
    out.set_item("nilpotent_size", n - fitting.invertible_size())?;
    Ok(out)
}

#[pymodule]
fn pyccgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRing>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(free_algebra_chain, m)?)?;
    m.add_function(wrap_pyfunction!(jordan, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
