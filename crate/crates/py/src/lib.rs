//! Python bindings: thin wrappers over the core types plus the handful of
//! operations a notebook user needs — sampling, exact min-cut computation,
//! bound curves, and Monte Carlo tails.
//!
//! Exact rationals cross the boundary as strings ("a" or "a/b") to keep
//! the no-floats-in, exact-values-out contract; convenience floats are
//! returned alongside where plotting is the obvious next step.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use cutbound::cuts;
use cutbound::ensemble::{self, SamplingMode};
use cutbound::experiment::{self, ExperimentPlan};
use cutbound::genpoly::{degree_product_table, parse_rational, rational_to_f64, rational_to_string};

fn err_py(e: cutbound::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A degree profile: vertex count plus exact per-degree fractions.
#[pyclass(frozen, name = "DegreeDistribution", module = "cutbound_py")]
struct PyDegreeDistribution {
    inner: ensemble::DegreeDistribution,
}

#[pymethods]
impl PyDegreeDistribution {
    /// `DegreeDistribution(n, [(degree, "a/b"), ...])` — fractions are
    /// exact rational strings and must sum to 1.
    #[new]
    fn new(n: usize, fractions: Vec<(usize, String)>) -> PyResult<Self> {
        let mut pairs = Vec::with_capacity(fractions.len());
        for (degree, text) in &fractions {
            pairs.push((*degree, parse_rational(text).map_err(err_py)?));
        }
        ensemble::DegreeDistribution::new(n, pairs)
            .map(|inner| Self { inner })
            .map_err(err_py)
    }

    /// The c-regular profile on n vertices.
    #[staticmethod]
    fn regular(n: usize, c: usize) -> PyResult<Self> {
        ensemble::DegreeDistribution::regular(n, c)
            .map(|inner| Self { inner })
            .map_err(err_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Canonical (ascending) degree sequence.
    fn degree_sequence(&self) -> Vec<usize> {
        self.inner.degree_sequence()
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self
            .inner
            .fractions()
            .iter()
            .map(|(d, f)| format!("{d}: {}", rational_to_string(f)))
            .collect();
        format!(
            "DegreeDistribution(n={}, {{{}}})",
            self.inner.n(),
            parts.join(", ")
        )
    }
}

/// An i.i.d. edge-weight distribution on {1, ..., q}.
#[pyclass(frozen, name = "WeightDistribution", module = "cutbound_py")]
struct PyWeightDistribution {
    inner: ensemble::WeightDistribution,
}

#[pymethods]
impl PyWeightDistribution {
    /// `WeightDistribution(q, [(weight, "a/b"), ...])` — masses are exact
    /// rational strings and must sum to 1.
    #[new]
    fn new(q: u32, masses: Vec<(u32, String)>) -> PyResult<Self> {
        let mut pairs = Vec::with_capacity(masses.len());
        for (weight, text) in &masses {
            pairs.push((*weight, parse_rational(text).map_err(err_py)?));
        }
        ensemble::WeightDistribution::new(q, pairs)
            .map(|inner| Self { inner })
            .map_err(err_py)
    }

    /// Unit weights: every edge has capacity 1.
    #[staticmethod]
    fn unit() -> Self {
        Self {
            inner: ensemble::WeightDistribution::unit(),
        }
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self
            .inner
            .mass()
            .iter()
            .map(|(w, p)| format!("{w}: {}", rational_to_string(p)))
            .collect();
        format!(
            "WeightDistribution(q={}, {{{}}})",
            self.inner.q(),
            parts.join(", ")
        )
    }
}

/// An undirected multigraph with positive integer edge capacities.
#[pyclass(frozen, name = "Graph", module = "cutbound_py")]
struct PyGraph {
    inner: ensemble::WeightedMultigraph,
}

#[pymethods]
impl PyGraph {
    /// `Graph(n, [(a, b, capacity), ...])` — loops and parallel edges are
    /// allowed, capacities must be ≥ 1.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, u32)>) -> PyResult<Self> {
        ensemble::WeightedMultigraph::from_edges(n, edges)
            .map(|inner| Self { inner })
            .map_err(err_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn edges(&self) -> Vec<(usize, usize, u32)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (e.a, e.b, e.cap))
            .collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn is_simple(&self) -> bool {
        self.inner.is_simple()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={}, total_capacity={})",
            self.inner.n(),
            self.inner.num_edges(),
            self.inner.total_capacity()
        )
    }
}

/// Draws one ensemble graph. `sample_index` selects the RNG stream, so
/// (seed, sample_index) pairs reproduce exactly the graphs a Monte Carlo
/// run with the same seed visits.
#[pyfunction]
#[pyo3(signature = (dd, mu, seed, mode = "simple", sample_index = 0))]
fn sample_graph(
    dd: &PyDegreeDistribution,
    mu: &PyWeightDistribution,
    seed: u64,
    mode: &str,
    sample_index: u64,
) -> PyResult<PyGraph> {
    let mode: SamplingMode = mode.parse().map_err(err_py)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    ensemble::sample_graph(&dd.inner.degree_sequence(), &mu.inner, &mut rng, mode)
        .map(|inner| PyGraph { inner })
        .map_err(err_py)
}

/// Minimum s-t cut weight (max-flow); 0 when s and t are disconnected.
#[pyfunction]
fn min_st_cut(g: &PyGraph, s: usize, t: usize) -> PyResult<u64> {
    cuts::min_st_cut(&g.inner, s, t).map_err(err_py)
}

/// Minimum cut weight over all proper bipartitions; 0 when disconnected.
#[pyfunction]
fn global_min_cut(g: &PyGraph) -> PyResult<u64> {
    cuts::global_min_cut(&g.inner).map_err(err_py)
}

/// Total capacity crossing the bipartition given by `side` (one bool per
/// vertex).
#[pyfunction]
fn cut_weight(g: &PyGraph, side: Vec<bool>) -> PyResult<u64> {
    cuts::cut_weight(&g.inner, &side).map_err(err_py)
}

/// The analytic lower bound curve on Pr[λ ≥ δ] for δ = 1..=delta_max.
/// Returns rows `(delta, raw_exact, clamped_exact, raw, clamped)` where
/// the `_exact` entries are rational strings.
#[pyfunction]
fn tail_lower_bound(
    dd: &PyDegreeDistribution,
    mu: &PyWeightDistribution,
    delta_max: u32,
) -> PyResult<Vec<(u32, String, String, f64, f64)>> {
    let table = degree_product_table(&dd.inner);
    let curve =
        cutbound::bound::tail_lower_bound(&dd.inner, &mu.inner, &table, delta_max).map_err(err_py)?;
    Ok(curve
        .entries()
        .iter()
        .map(|e| {
            (
                e.delta,
                rational_to_string(&e.raw),
                rational_to_string(&e.clamped),
                rational_to_f64(&e.raw),
                rational_to_f64(&e.clamped),
            )
        })
        .collect())
}

fn plan(num_samples: u64, seed: u64, mode: &str, delta_max: u32) -> PyResult<ExperimentPlan> {
    let mode: SamplingMode = mode.parse().map_err(err_py)?;
    Ok(ExperimentPlan::new(num_samples, seed, mode, delta_max))
}

fn tail_rows(tail: &experiment::EmpiricalTail) -> Vec<(u32, u64, f64, f64)> {
    tail.entries()
        .map(|e| (e.delta, e.count_geq, e.estimate, e.stderr))
        .collect()
}

/// Monte Carlo tail of the minimum s-t cut weight. Returns rows
/// `(delta, count_geq, estimate, stderr)`.
#[pyfunction]
#[pyo3(signature = (dd, mu, num_samples, seed, mode = "simple", delta_max = 10))]
fn run_st_experiment(
    dd: &PyDegreeDistribution,
    mu: &PyWeightDistribution,
    num_samples: u64,
    seed: u64,
    mode: &str,
    delta_max: u32,
) -> PyResult<Vec<(u32, u64, f64, f64)>> {
    let plan = plan(num_samples, seed, mode, delta_max)?;
    let tail = experiment::run_st_experiment(&dd.inner, &mu.inner, &plan).map_err(err_py)?;
    Ok(tail_rows(&tail))
}

/// Monte Carlo tail of the global minimum cut weight over the same graph
/// stream as [`run_st_experiment`].
#[pyfunction]
#[pyo3(signature = (dd, mu, num_samples, seed, mode = "simple", delta_max = 10))]
fn run_global_experiment(
    dd: &PyDegreeDistribution,
    mu: &PyWeightDistribution,
    num_samples: u64,
    seed: u64,
    mode: &str,
    delta_max: u32,
) -> PyResult<Vec<(u32, u64, f64, f64)>> {
    let plan = plan(num_samples, seed, mode, delta_max)?;
    let tail = experiment::run_global_experiment(&dd.inner, &mu.inner, &plan).map_err(err_py)?;
    Ok(tail_rows(&tail))
}

#[pymodule]
fn cutbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDegreeDistribution>()?;
    m.add_class::<PyWeightDistribution>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(sample_graph, m)?)?;
    m.add_function(wrap_pyfunction!(min_st_cut, m)?)?;
    m.add_function(wrap_pyfunction!(global_min_cut, m)?)?;
    m.add_function(wrap_pyfunction!(cut_weight, m)?)?;
    m.add_function(wrap_pyfunction!(tail_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(run_st_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_global_experiment, m)?)?;
    Ok(())
}
