//! Python bindings: oriented graphs, degree-preserving equipartitions,
//! oriented Hamilton search, cycle-factors, and the Monte Carlo experiments.
//!
//! Build with `cargo build -p oritile-py --release`; the resulting cdylib
//! imports as the `oritile_py` module (see python/smoke_test.py).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use oritile_core::edgelist;
use oritile_core::experiments;
use oritile_core::factor;
use oritile_core::generate;
use oritile_core::graph::{DegreeMode, Direction, OrientedGraph};
use oritile_core::hamilton;
use oritile_core::partition;

fn parse_mode(mode: &str) -> PyResult<DegreeMode> {
    match mode {
        "semi" => Ok(DegreeMode::Semi),
        "total" => Ok(DegreeMode::Total),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'semi' or 'total', got {other:?}"
        ))),
    }
}

fn parse_direction(dir: &str) -> PyResult<Direction> {
    match dir {
        "out" => Ok(Direction::Out),
        "in" => Ok(Direction::In),
        other => Err(PyValueError::new_err(format!(
            "direction must be 'out' or 'in', got {other:?}"
        ))),
    }
}

fn parse_pattern(s: &str) -> PyResult<hamilton::OrientationPattern> {
    s.parse()
        .map_err(|e| PyValueError::new_err(format!("bad pattern {s:?}: {e}")))
}

/// Converts any serde-serializable value into plain Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let json = serde_json::to_value(value)
        .map_err(|e| PyRuntimeError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &json)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value::*;
    Ok(match v {
        Null => py.None().into_bound(py),
        Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64()
                    .expect("json number is i64 or f64")
                    .into_pyobject(py)?
                    .into_any()
            }
        }
        String(s) => s.into_pyobject(py)?.into_any(),
        Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// An oriented graph: no loops, at most one direction per vertex pair.
#[pyclass(name = "Graph")]
struct PyGraph {
    inner: OrientedGraph,
}

#[pymethods]
impl PyGraph {
    /// Build from an explicit directed edge list.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        OrientedGraph::from_edges(n, edges)
            .map(|inner| PyGraph { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Random tournament on n vertices, deterministic per seed.
    #[staticmethod]
    fn tournament(n: usize, seed: u64) -> Self {
        PyGraph {
            inner: generate::random_tournament(n, seed),
        }
    }

    /// Random oriented graph with edge probability p, deterministic per seed.
    #[staticmethod]
    fn oriented(n: usize, p: f64, seed: u64) -> PyResult<Self> {
        generate::random_oriented(n, p, seed)
            .map(|inner| PyGraph { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Parse an edge-list file.
    #[staticmethod]
    fn read_edgelist(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| PyValueError::new_err(format!("cannot open {path}: {e}")))?;
        edgelist::read_edge_list(std::io::BufReader::new(file))
            .map(|inner| PyGraph { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn write_edgelist(&self, path: &str) -> PyResult<()> {
        let mut buf = Vec::new();
        edgelist::write_edge_list(&self.inner, &mut buf, &[])
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        std::fs::write(path, buf)
            .map_err(|e| PyRuntimeError::new_err(format!("cannot write {path}: {e}")))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.inner.out_neighbors(v).to_vec()
    }

    fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.inner.in_neighbors(v).to_vec()
    }

    /// Minimum semi-degree ('semi') or minimum total degree ('total').
    #[pyo3(signature = (mode = "semi"))]
    fn min_degree(&self, mode: &str) -> PyResult<usize> {
        Ok(self.inner.min_degree(parse_mode(mode)?))
    }

    #[pyo3(signature = (mode = "semi"))]
    fn min_relative_degree(&self, mode: &str) -> PyResult<f64> {
        Ok(self.inner.min_relative_degree(parse_mode(mode)?))
    }

    /// |N^dir(v) ∩ w|.
    fn degree_into(&self, v: usize, w: Vec<usize>, direction: &str) -> PyResult<usize> {
        if let Some(&bad) = w.iter().find(|&&u| u >= self.inner.n()) {
            return Err(PyValueError::new_err(format!("set member {bad} out of range")));
        }
        self.inner
            .degree_into(v, &w, parse_direction(direction)?)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Induced subgraph, densely relabeled. Returns (graph, original_ids).
    fn induced(&self, w: Vec<usize>) -> PyResult<(Self, Vec<usize>)> {
        if let Some(&bad) = w.iter().find(|&&u| u >= self.inner.n()) {
            return Err(PyValueError::new_err(format!("vertex {bad} out of range")));
        }
        let mut sorted = w.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Err(PyValueError::new_err("duplicate vertex in set"));
        }
        let ind = self.inner.induced(&w);
        Ok((PyGraph { inner: ind.graph }, ind.original_ids))
    }

    fn canonical_hash(&self) -> String {
        edgelist::canonical_hash(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={})",
            self.inner.n(),
            self.inner.edge_count()
        )
    }
}

/// Result of a recursive equipartition.
#[pyclass(name = "Partition")]
struct PyPartition {
    inner: partition::Partition,
}

#[pymethods]
impl PyPartition {
    #[getter]
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.inner.blocks.clone()
    }

    #[getter]
    fn part_size(&self) -> usize {
        self.inner.part_size
    }

    #[getter]
    fn bound_claimed(&self) -> f64 {
        self.inner.bound_claimed
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k
    }

    #[getter]
    fn best_effort_used(&self) -> bool {
        self.inner.best_effort_used()
    }

    #[getter]
    fn below_threshold(&self) -> bool {
        self.inner.below_threshold()
    }

    /// Per-node split reports as a list of dicts.
    fn reports<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.reports)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(blocks={}, part_size={}, k={})",
            self.inner.blocks.len(),
            self.inner.part_size,
            self.inner.k
        )
    }
}

/// A verified cycle-factor.
#[pyclass(name = "FactorCertificate")]
struct PyFactorCertificate {
    inner: factor::FactorCertificate,
}

#[pymethods]
impl PyFactorCertificate {
    #[getter]
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.inner.partition.blocks.clone()
    }

    /// Embeddings in block order, original vertex ids in cycle order.
    #[getter]
    fn embeddings(&self) -> Vec<Vec<usize>> {
        self.inner
            .embeddings
            .iter()
            .map(|e| e.vertices.clone())
            .collect()
    }

    /// The realized pattern of each embedding, as '+'/'-' strings.
    #[getter]
    fn patterns(&self) -> Vec<String> {
        self.inner
            .embeddings
            .iter()
            .map(|e| e.pattern.to_string())
            .collect()
    }

    #[getter]
    fn guarantee_flags(&self) -> Vec<bool> {
        self.inner.guarantee_flags.clone()
    }

    #[getter]
    fn partition_degraded(&self) -> bool {
        self.inner.partition_degraded
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("FactorCertificate(parts={})", self.inner.embeddings.len())
    }
}

/// delta - 2 ell^(-1/3) * sum_{j<k} 2^(-j/3), not clamped.
#[pyfunction]
fn theoretical_bound(delta: f64, ell: usize, k: u32) -> f64 {
    partition::theoretical_bound(delta, ell, k)
}

/// delta - 10 ell^(-1/3).
#[pyfunction]
fn simplified_bound(delta: f64, ell: usize) -> f64 {
    partition::simplified_bound(delta, ell)
}

/// ceil((3n - 1) / 8): the asymptotic every-orientation guarantee.
#[pyfunction]
fn guarantee_threshold(n: usize) -> PyResult<usize> {
    if n < 3 {
        return Err(PyValueError::new_err("need n >= 3"));
    }
    Ok(hamilton::guarantee_threshold(n))
}

/// 2 exp(-2 t^2 / n).
#[pyfunction]
fn tail_bound(n: usize, t: f64) -> f64 {
    experiments::tail_bound(n, t)
}

/// One degree-preserving split. Returns (left_vertices, report_dict).
#[pyfunction]
#[pyo3(signature = (graph, m1, mode = "semi", seed = 0, max_attempts = 100))]
fn random_split<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    m1: usize,
    mode: &str,
    seed: u64,
    max_attempts: usize,
) -> PyResult<(Vec<usize>, Bound<'py, PyAny>)> {
    let (left, report) =
        partition::random_split(&graph.inner, m1, parse_mode(mode)?, seed, max_attempts)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((left, to_py(py, &report)?))
}

/// Recursive degree-preserving equipartition into blocks of size ell.
#[pyfunction(name = "partition")]
#[pyo3(signature = (graph, ell, mode = "semi", seed = 0, max_attempts = 100, best_effort = false))]
fn partition_fn(
    graph: &PyGraph,
    ell: usize,
    mode: &str,
    seed: u64,
    max_attempts: usize,
    best_effort: bool,
) -> PyResult<PyPartition> {
    let policy = if best_effort {
        partition::SplitPolicy::BestEffort
    } else {
        partition::SplitPolicy::Strict
    };
    partition::recursive_equipartition(
        &graph.inner,
        ell,
        parse_mode(mode)?,
        seed,
        max_attempts,
        policy,
    )
    .map(|inner| PyPartition { inner })
    .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Structural and degree recheck; returns a dict verdict.
#[pyfunction]
#[pyo3(signature = (graph, part, mode = "semi"))]
fn verify_partition<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    part: &PyPartition,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let verdict = partition::verify_partition(&graph.inner, &part.inner, parse_mode(mode)?);
    to_py(py, &verdict)
}

/// Exact subset-DP search. Returns the vertex order or None (certified).
#[pyfunction]
#[pyo3(signature = (graph, pattern, dp_cap = hamilton::DEFAULT_DP_CAP))]
fn find_cycle_dp(graph: &PyGraph, pattern: &str, dp_cap: usize) -> PyResult<Option<Vec<usize>>> {
    let p = parse_pattern(pattern)?;
    if p.len() != graph.inner.n() {
        return Err(PyValueError::new_err(format!(
            "pattern length {} != graph order {}",
            p.len(),
            graph.inner.n()
        )));
    }
    match hamilton::find_cycle_dp(&graph.inner, &p, dp_cap) {
        Ok(found) => Ok(found.map(|e| e.vertices)),
        Err(e) => Err(PyValueError::new_err(e.to_string())),
    }
}

/// Budgeted backtracking search. Returns (status, vertices_or_None) with
/// status in {'found', 'not_found', 'budget_exhausted'}.
#[pyfunction]
#[pyo3(signature = (graph, pattern, budget = hamilton::DEFAULT_BACKTRACK_BUDGET))]
fn find_cycle_backtrack(
    graph: &PyGraph,
    pattern: &str,
    budget: u64,
) -> PyResult<(String, Option<Vec<usize>>)> {
    let p = parse_pattern(pattern)?;
    if p.len() != graph.inner.n() {
        return Err(PyValueError::new_err(format!(
            "pattern length {} != graph order {}",
            p.len(),
            graph.inner.n()
        )));
    }
    Ok(match hamilton::find_cycle_backtrack(&graph.inner, &p, budget) {
        hamilton::SearchOutcome::Found(e) => ("found".into(), Some(e.vertices)),
        hamilton::SearchOutcome::NotFound => ("not_found".into(), None),
        hamilton::SearchOutcome::BudgetExhausted { .. } => ("budget_exhausted".into(), None),
    })
}

/// Checks vertices against the pattern. Returns (ok, first_failure_or_None).
#[pyfunction]
fn verify_embedding(
    graph: &PyGraph,
    vertices: Vec<usize>,
    pattern: &str,
) -> PyResult<(bool, Option<String>)> {
    let p = parse_pattern(pattern)?;
    let emb = hamilton::CycleEmbedding {
        vertices,
        pattern: p,
    };
    let v = hamilton::verify_embedding(&graph.inner, &emb);
    Ok((v.ok, v.first_failure.map(|f| format!("{f:?}"))))
}

/// Canonical representative of a pattern's rotation/reversal class.
#[pyfunction]
fn canonicalize_pattern(pattern: &str) -> PyResult<String> {
    Ok(parse_pattern(pattern)?.canonical().to_string())
}

/// Full pipeline: equipartition then per-part search.
#[pyfunction]
#[pyo3(signature = (graph, ell, patterns = None, mode = "semi", seed = 0, max_attempts = 100,
                    dp_cap = hamilton::DEFAULT_DP_CAP, budget = hamilton::DEFAULT_BACKTRACK_BUDGET,
                    best_effort = false))]
#[allow(clippy::too_many_arguments)]
fn cycle_factor(
    graph: &PyGraph,
    ell: usize,
    patterns: Option<Vec<String>>,
    mode: &str,
    seed: u64,
    max_attempts: usize,
    dp_cap: usize,
    budget: u64,
    best_effort: bool,
) -> PyResult<PyFactorCertificate> {
    let spec = match patterns {
        None => None,
        Some(list) => {
            let parsed: Vec<hamilton::OrientationPattern> = list
                .iter()
                .map(|s| parse_pattern(s))
                .collect::<PyResult<_>>()?;
            Some(if parsed.len() == 1 {
                factor::PatternSpec::Uniform(parsed.into_iter().next().unwrap())
            } else {
                factor::PatternSpec::PerPart(parsed)
            })
        }
    };
    let req = factor::FactorRequest {
        ell,
        patterns: spec,
        mode: parse_mode(mode)?,
        seed,
        max_attempts,
        dp_cap,
        budget,
        best_effort,
    };
    factor::cycle_factor(&graph.inner, &req)
        .map(|inner| PyFactorCertificate { inner })
        .map_err(|e| match e {
            factor::FactorFailure::Divisibility { .. }
            | factor::FactorFailure::PartSizeTooSmall(_)
            | factor::FactorFailure::PatternCount { .. }
            | factor::FactorFailure::PatternLength { .. } => PyValueError::new_err(e.to_string()),
            other => PyRuntimeError::new_err(other.to_string()),
        })
}

/// Independent recheck of a certificate. Returns (ok, failures).
#[pyfunction]
fn verify_factor(graph: &PyGraph, cert: &PyFactorCertificate) -> (bool, Vec<String>) {
    let v = factor::verify_factor(&graph.inner, &cert.inner);
    (v.ok(), v.failures)
}

/// Degree-vs-threshold report for a given epsilon, as a dict.
#[pyfunction]
fn threshold_report<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    ell: usize,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &factor::threshold_report(&graph.inner, ell, eps))
}

/// One draw of |S ∩ [m]| for a uniform size-n subset S of [N].
#[pyfunction]
fn sample_hypergeometric(big_n: usize, n: usize, m: usize, seed: u64) -> PyResult<usize> {
    experiments::sample_hypergeometric(big_n, n, m, seed)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Monte Carlo tail frequency vs the 2 exp(-2 t^2 / n) bound, as a dict.
#[pyfunction]
#[pyo3(signature = (big_n, n, m, t, samples = 100_000, seed = 0))]
fn tail_experiment<'py>(
    py: Python<'py>,
    big_n: usize,
    n: usize,
    m: usize,
    t: f64,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let params = experiments::TailParams {
        big_n,
        n,
        m,
        t,
        samples,
        seed,
    };
    let report = experiments::tail_experiment(&params)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &report)
}

/// Single-split success rate on a random tournament, as a dict.
#[pyfunction]
#[pyo3(signature = (n, trials, mode = "semi", seed = 0))]
fn split_success_experiment<'py>(
    py: Python<'py>,
    n: usize,
    trials: usize,
    mode: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let report = experiments::split_success_experiment(n, trials, parse_mode(mode)?, seed)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &report)
}

#[pymodule]
fn oritile_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyFactorCertificate>()?;
    m.add_function(wrap_pyfunction!(theoretical_bound, m)?)?;
    m.add_function(wrap_pyfunction!(simplified_bound, m)?)?;
    m.add_function(wrap_pyfunction!(guarantee_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(random_split, m)?)?;
    m.add_function(wrap_pyfunction!(partition_fn, m)?)?;
    m.add_function(wrap_pyfunction!(verify_partition, m)?)?;
    m.add_function(wrap_pyfunction!(find_cycle_dp, m)?)?;
    m.add_function(wrap_pyfunction!(find_cycle_backtrack, m)?)?;
    m.add_function(wrap_pyfunction!(verify_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_factor, m)?)?;
    m.add_function(wrap_pyfunction!(verify_factor, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_report, m)?)?;
    m.add_function(wrap_pyfunction!(sample_hypergeometric, m)?)?;
    m.add_function(wrap_pyfunction!(tail_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(split_success_experiment, m)?)?;
    Ok(())
}
