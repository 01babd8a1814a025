//! Python bindings: build and query stores, rewrite queries, generate and
//! validate data, and run the benchmark matrix.
//!
//! Terms cross the boundary as their lexical form (IRI text or literal
//! value). N-Triples documents are passed as strings.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rostore::bench::{bundled_workload, run_bench};
use rostore::conformance::check_conformance;
use rostore::datagen::{bundled_ontology_text, generate as generate_data, GenConfig, DEFAULT_SEED};
use rostore::engine::{evaluate_oracle, execute_plan, plan_query, PhysicalPlan, ResultSet};
use rostore::ntriples::{parse_ntriples, serialize_ntriples};
use rostore::ontology::Ontology as CoreOntology;
use rostore::query::{emit_sql, parse_query as parse_core};
use rostore::rdf::{Dataset, Iri};
use rostore::sqr::{rewrite, RewriteFlags, RewriteOutcome};
use rostore::storage::{build_layout, load_store, LayoutKind, Orientation, StorageError, StoreInstance};

const SCHEMA_FILE: &str = "schema.nt";

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn storage_err(e: StorageError) -> PyErr {
    match e {
        StorageError::Io { .. } => PyOSError::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn dataset(text: &str) -> PyResult<Dataset> {
    parse_ntriples(text).map_err(value_err)
}

fn iri(text: &str) -> PyResult<Iri> {
    Iri::new(text).map_err(value_err)
}

fn flags(subsume: bool, property_check: bool, assume_conformant: bool) -> RewriteFlags {
    RewriteFlags { conformant: assume_conformant, enable_subsume: subsume, enable_property_check: property_check }
}

fn lexical_rows(rs: &ResultSet) -> Vec<Vec<String>> {
    rs.rows.iter().map(|r| r.iter().map(|t| t.lexical().to_string()).collect()).collect()
}

/// Property and class hierarchy with domains, ranges and disjointness.
#[pyclass(frozen)]
struct Ontology {
    inner: CoreOntology,
}

#[pymethods]
impl Ontology {
    #[new]
    fn new(schema: &str) -> PyResult<Self> {
        Ok(Ontology { inner: CoreOntology::from_schema_canonical(&dataset(schema)?) })
    }

    #[staticmethod]
    fn bundled() -> Self {
        Ontology { inner: CoreOntology::from_schema_canonical(&parse_ntriples(bundled_ontology_text()).expect("bundled")) }
    }

    /// The property and all its sub-properties, itself first.
    fn sub_properties(&self, property: &str) -> PyResult<Vec<String>> {
        Ok(self.inner.sub_properties(&iri(property)?).iter().map(|i| i.as_str().to_string()).collect())
    }

    fn sub_classes(&self, class: &str) -> PyResult<Vec<String>> {
        Ok(self.inner.sub_classes(&iri(class)?).iter().map(|i| i.as_str().to_string()).collect())
    }

    fn top_property_of(&self, property: &str) -> PyResult<String> {
        Ok(self.inner.top_property_of(&iri(property)?).as_str().to_string())
    }

    fn canonical_property(&self, property: &str) -> PyResult<String> {
        Ok(self.inner.canonical_property(&iri(property)?).as_str().to_string())
    }

    fn classes_disjoint(&self, a: &str, b: &str) -> PyResult<bool> {
        Ok(self.inner.classes_disjoint(&iri(a)?, &iri(b)?))
    }
}

/// Outcome of one query: either unsatisfiable with an explanation, or
/// result rows with the plan metrics.
#[pyclass(frozen, get_all)]
struct QueryResult {
    unsat: bool,
    explanation: Option<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    relations_scanned: usize,
    joins: usize,
    unions: usize,
}

#[pymethods]
impl QueryResult {
    fn __len__(&self) -> usize {
        self.rows.len()
    }

    fn __repr__(&self) -> String {
        match &self.explanation {
            Some(e) => format!("QueryResult({e})"),
            None => format!(
                "QueryResult(rows={}, scans={}, joins={}, unions={})",
                self.rows.len(),
                self.relations_scanned,
                self.joins,
                self.unions
            ),
        }
    }
}

/// A loaded store in one layout and orientation, with its ontology.
#[pyclass(frozen)]
struct Store {
    inner: StoreInstance,
    ontology: CoreOntology,
    schema: String,
}

enum Prepared {
    Unsat(String),
    Plan(PhysicalPlan, Box<rostore::sqr::ExpandedQuery>),
}

impl Store {
    fn prepare(&self, query: &str, f: RewriteFlags) -> PyResult<Prepared> {
        let q = parse_core(query).map_err(value_err)?;
        match rewrite(&q, &self.ontology, f) {
            RewriteOutcome::Rewritten { query, .. } => {
                let plan = plan_query(&query, self.inner.descriptor()).map_err(value_err)?;
                Ok(Prepared::Plan(plan, Box::new(query)))
            }
            unsat => Ok(Prepared::Unsat(unsat.explanation().expect("unsat"))),
        }
    }
}

#[pymethods]
impl Store {
    /// `layout` is "triple", "vp" or "ro"; `orientation` is "row" or "column".
    #[new]
    #[pyo3(signature = (data, schema, layout = "ro", orientation = "row"))]
    fn new(data: &str, schema: &str, layout: &str, orientation: &str) -> PyResult<Self> {
        let kind: LayoutKind = layout.parse().map_err(PyValueError::new_err)?;
        let orientation: Orientation = orientation.parse().map_err(PyValueError::new_err)?;
        let ontology = CoreOntology::from_schema_canonical(&dataset(schema)?);
        let data = dataset(data)?;
        let d = build_layout(&ontology, &data.predicates(), kind);
        let inner = load_store(&data, &d, orientation).map_err(storage_err)?;
        Ok(Store { inner, ontology, schema: schema.to_string() })
    }

    /// Opens a store directory written by `save` or `rostore load`.
    #[staticmethod]
    fn open(path: PathBuf) -> PyResult<Self> {
        let inner = StoreInstance::open(&path).map_err(storage_err)?;
        let schema_path = path.join(SCHEMA_FILE);
        let schema = std::fs::read_to_string(&schema_path)
            .map_err(|e| PyOSError::new_err(format!("{}: {e}", schema_path.display())))?;
        let ontology = CoreOntology::from_schema_canonical(&dataset(&schema)?);
        Ok(Store { inner, ontology, schema })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(storage_err)?;
        let schema_path = path.join(SCHEMA_FILE);
        std::fs::write(&schema_path, &self.schema)
            .map_err(|e| PyOSError::new_err(format!("{}: {e}", schema_path.display())))
    }

    #[getter]
    fn layout(&self) -> String {
        self.inner.descriptor().kind.to_string()
    }

    #[getter]
    fn orientation(&self) -> String {
        self.inner.orientation().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.row_count()
    }

    /// `(name, arity, rows)` for every relation.
    fn relations(&self) -> Vec<(String, u8, usize)> {
        self.inner.relations().map(|r| (r.name().to_string(), r.arity(), r.len())).collect()
    }

    /// Rows examined by scans since the store was built.
    fn touched_rows(&self) -> u64 {
        self.inner.touched_rows()
    }

    #[pyo3(signature = (query, subsume = true, property_check = true, assume_conformant = false))]
    fn query(&self, query: &str, subsume: bool, property_check: bool, assume_conformant: bool) -> PyResult<QueryResult> {
        Ok(match self.prepare(query, flags(subsume, property_check, assume_conformant))? {
            Prepared::Unsat(explanation) => QueryResult {
                unsat: true,
                explanation: Some(explanation),
                columns: Vec::new(),
                rows: Vec::new(),
                relations_scanned: 0,
                joins: 0,
                unions: 0,
            },
            Prepared::Plan(plan, _) => {
                let rs = execute_plan(&plan, &self.inner);
                let m = plan.metrics();
                QueryResult {
                    unsat: false,
                    explanation: None,
                    rows: lexical_rows(&rs),
                    columns: rs.schema,
                    relations_scanned: m.relations_scanned,
                    joins: m.joins,
                    unions: m.unions,
                }
            }
        })
    }

    /// The plan tree and metrics line, or the UNSAT line.
    #[pyo3(signature = (query, subsume = true, property_check = true, assume_conformant = false))]
    fn explain(&self, query: &str, subsume: bool, property_check: bool, assume_conformant: bool) -> PyResult<String> {
        Ok(match self.prepare(query, flags(subsume, property_check, assume_conformant))? {
            Prepared::Unsat(explanation) => explanation,
            Prepared::Plan(plan, _) => plan.explain(),
        })
    }

    /// SQL for the rewritten query. Not available for the triple table.
    #[pyo3(signature = (query, subsume = true, property_check = true, assume_conformant = false))]
    fn emit_sql(&self, query: &str, subsume: bool, property_check: bool, assume_conformant: bool) -> PyResult<String> {
        match self.prepare(query, flags(subsume, property_check, assume_conformant))? {
            Prepared::Unsat(explanation) => Err(PyValueError::new_err(explanation)),
            Prepared::Plan(_, expanded) => emit_sql(&expanded, self.inner.descriptor()).map_err(value_err),
        }
    }
}

/// Normalized text of a parsed query.
#[pyfunction]
fn parse_query(text: &str) -> PyResult<String> {
    Ok(parse_core(text).map_err(value_err)?.to_string())
}

/// University data as N-Triples.
#[pyfunction]
#[pyo3(signature = (universities, seed = DEFAULT_SEED))]
fn generate(universities: u32, seed: u64) -> String {
    serialize_ntriples(&generate_data(GenConfig::new(universities, seed)))
}

#[pyfunction]
fn bundled_ontology() -> &'static str {
    bundled_ontology_text()
}

/// Conformance violations, one string each; empty when conformant.
#[pyfunction]
fn validate(data: &str, schema: &str) -> PyResult<Vec<String>> {
    let o = CoreOntology::from_schema_canonical(&dataset(schema)?);
    Ok(check_conformance(&dataset(data)?, &o).violations.iter().map(|v| v.to_string()).collect())
}

/// Reference answers from the materialized closure, without rewriting.
#[pyfunction]
fn oracle(query: &str, data: &str, schema: &str) -> PyResult<Vec<Vec<String>>> {
    let q = parse_core(query).map_err(value_err)?;
    let o = CoreOntology::from_schema_canonical(&dataset(schema)?);
    Ok(lexical_rows(&evaluate_oracle(&q, &dataset(data)?, &o)))
}

/// Runs the bundled workload on every layout and orientation; one dict per
/// cell with the report columns.
#[pyfunction]
#[pyo3(name = "bench", signature = (schema, data, runs = 1, parallel = false))]
fn bench_matrix<'py>(py: Python<'py>, schema: &str, data: &str, runs: usize, parallel: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if runs == 0 {
        return Err(PyValueError::new_err("runs must be at least 1"));
    }
    let rows = run_bench(&dataset(schema)?, &dataset(data)?, &bundled_workload(), runs, parallel).map_err(value_err)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("query_id", r.query_id)?;
            d.set_item("layout", r.layout)?;
            d.set_item("orientation", r.orientation)?;
            d.set_item("rewrite_flags", r.rewrite_flags)?;
            d.set_item("runs", r.runs)?;
            d.set_item("mean_ms", r.mean_ms)?;
            d.set_item("rows", r.rows)?;
            d.set_item("relations_scanned", r.relations_scanned)?;
            d.set_item("joins", r.joins)?;
            d.set_item("unions", r.unions)?;
            d.set_item("unsat", r.unsat)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pyrostore(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ontology>()?;
    m.add_class::<Store>()?;
    m.add_class::<QueryResult>()?;
    m.add_function(wrap_pyfunction!(parse_query, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_ontology, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(bench_matrix, m)?)?;
    Ok(())
}
