//! Python bindings. Structured inputs and results cross the boundary as plain
//! dicts and lists, converted through JSON.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use resil_core as core;
use resil_core::buffering::{self, Agent, FunctionDemand};
use resil_core::cascade::{self, FlowModel, Routing, WeightedFlowSpec};
use resil_core::graph::{self, GeneratorSpec};
use resil_core::harness::{self, ResilienceTrace, RunOptions, Scenario, ScenarioError};
use resil_core::interdependent::{self, CouplingMode, SweepCoupling};
use resil_core::percolation::{self, PercolationCurve, RemovalPlan, RemovalStrategy};
use resil_core::truth::{self, CredibilityEstimate, EmOptions, SynthSpec};

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn scenario_err(e: ScenarioError) -> PyErr {
    match e {
        ScenarioError::Runtime(inner) => err(inner),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = value.py().import("json")?.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Parses a bare enum name such as `"random"`.
fn from_name<T: DeserializeOwned>(name: &str) -> PyResult<T> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Undirected simple graph on nodes `0..n`, optionally with edge weights.
#[pyclass(name = "Graph", module = "resil", frozen)]
struct PyGraph(core::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges, weights=None))]
    fn new(n: usize, edges: Vec<(usize, usize)>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let g = match weights {
            None => core::Graph::new(n, edges),
            Some(w) if w.len() != edges.len() => {
                return Err(err(core::Error::SizeMismatch { left: edges.len(), right: w.len() }))
            }
            Some(w) => core::Graph::weighted(n, edges.into_iter().zip(w).map(|((u, v), w)| (u, v, w))),
        };
        g.map(PyGraph).map_err(err)
    }

    /// Parses the `u v [w]` edge-list text format.
    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        graph::io::read_edge_list_str(text).map(PyGraph).map_err(err)
    }

    fn to_edge_list(&self) -> String {
        graph::io::write_edge_list(&self.0)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    #[getter]
    fn weights(&self) -> Option<Vec<f64>> {
        self.0.weights().map(<[f64]>::to_vec)
    }

    fn degrees(&self) -> Vec<usize> {
        self.0.degrees()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.0.node_count() {
            return Err(PyValueError::new_err(format!("node {v} out of range")));
        }
        Ok(self.0.neighbors(v).to_vec())
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.0.node_count() && v < self.0.node_count() && self.0.has_edge(u, v)
    }

    fn giant_component(&self) -> Vec<usize> {
        graph::giant_component(&self.0)
    }

    fn betweenness(&self) -> Vec<f64> {
        graph::betweenness(&self.0)
    }

    fn current_flow_betweenness(&self) -> Vec<f64> {
        graph::current_flow_betweenness(&self.0, None)
    }

    /// Mean hop distance over the giant component, exact unless `sample_pairs` is given.
    #[pyo3(signature = (sample_pairs=None, seed=0))]
    fn average_path_length(&self, sample_pairs: Option<usize>, seed: u64) -> PyResult<f64> {
        graph::average_path_length(&self.0, sample_pairs, seed).map_err(err)
    }

    /// `{"mean_k", "mean_k2", "kappa", "f_c"}` of the realized degrees.
    fn degree_stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s = graph::degree_stats(&self.0).map_err(err)?;
        let v = serde_json::json!({ "mean_k": s.mean_k, "mean_k2": s.mean_k2, "kappa": s.kappa, "f_c": s.f_c });
        to_py(py, &v)
    }

    fn effective_conductance(&self, s: usize, t: usize) -> PyResult<f64> {
        graph::effective_conductance(&self.0, s, t).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.node_count()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={}, weighted={})", self.0.node_count(), self.0.edge_count(), self.0.is_weighted())
    }
}

/// Builds a graph from a generator dict, e.g.
/// `{"kind": "erdos_renyi", "n": 1000, "mean_degree": 3.0, "seed": 1}`.
#[pyfunction]
fn generate(spec: &Bound<'_, PyAny>) -> PyResult<PyGraph> {
    let spec: GeneratorSpec = from_py(spec)?;
    graph::generate(&spec).map(PyGraph).map_err(err)
}

/// Giant-component fraction `S` (and survivor path length) over the removal grid.
#[pyfunction]
#[pyo3(signature = (spec, f_grid, strategy="random", replicates=10, seed=0))]
fn percolation_sweep<'py>(
    py: Python<'py>,
    spec: &Bound<'py, PyAny>,
    f_grid: Vec<f64>,
    strategy: &str,
    replicates: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec: GeneratorSpec = from_py(spec)?;
    let strategy: RemovalStrategy = from_name(strategy)?;
    let curve = py
        .detach(|| percolation::sweep(&spec, &RemovalPlan::new(strategy, seed), &f_grid, replicates, seed))
        .map_err(err)?;
    to_py(py, &curve)
}

/// Removed fraction at which mean `S` first drops below `cutoff`, interpolated
/// between grid rows; `None` if it never does.
#[pyfunction]
#[pyo3(signature = (curve, cutoff=0.05))]
fn empirical_threshold(curve: &Bound<'_, PyAny>, cutoff: f64) -> PyResult<Option<f64>> {
    let curve: PercolationCurve = from_py(curve)?;
    percolation::empirical_threshold(&curve, cutoff).map_err(err)
}

/// Fraction-threshold contagion from the given initially failed nodes.
#[pyfunction]
fn watts_cascade<'py>(py: Python<'py>, g: &PyGraph, phi: f64, seeds: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(PyValueError::new_err(format!("phi {phi} outside (0, 1]")));
    }
    if let Some(v) = seeds.iter().find(|&&v| v >= g.0.node_count()) {
        return Err(PyValueError::new_err(format!("node {v} out of range")));
    }
    to_py(py, &cascade::watts_cascade_from(&g.0, phi, &seeds))
}

/// Overload cascade with capacity `(1 + alpha)` times the intact load.
/// `routing` is `"hops"` or `"current"` (edge weights as conductances).
#[pyfunction]
#[pyo3(signature = (g, alpha, initial, routing="hops"))]
fn load_cascade<'py>(
    py: Python<'py>,
    g: &PyGraph,
    alpha: f64,
    initial: Vec<usize>,
    routing: &str,
) -> PyResult<Bound<'py, PyAny>> {
    if !(alpha >= 0.0) {
        return Err(PyValueError::new_err(format!("alpha {alpha} must be >= 0")));
    }
    if let Some(v) = initial.iter().find(|&&v| v >= g.0.node_count()) {
        return Err(PyValueError::new_err(format!("node {v} out of range")));
    }
    let routing = match routing {
        "hops" => Routing::Hops,
        "current" => Routing::Current,
        other => return Err(PyValueError::new_err(format!("unknown routing `{other}`"))),
    };
    let result = py.detach(|| cascade::load_cascade(&g.0, alpha, &initial, routing));
    to_py(py, &result)
}

/// Links weighted by `(k_i k_j)^beta`.
#[pyfunction]
fn degree_weighted(g: &PyGraph, beta: f64) -> PyGraph {
    PyGraph(cascade::assign_degree_weights(&g.0, beta))
}

#[pyfunction]
#[pyo3(signature = (g, beta, rho=0.0, pair_samples=1000, seed=0))]
fn mean_conductance(g: &PyGraph, beta: f64, rho: f64, pair_samples: usize, seed: u64) -> PyResult<f64> {
    cascade::mean_conductance(&g.0, &WeightedFlowSpec { beta, rho, pair_samples, seed }).map_err(err)
}

/// `G'/G` after targeted removal plus overload cascade, per beta and f.
#[pyfunction]
#[pyo3(signature = (spec, beta_grid, f_grid, alpha, model="current", replicates=10, seed=0))]
#[allow(clippy::too_many_arguments)]
fn weighted_cascade_sweep<'py>(
    py: Python<'py>,
    spec: &Bound<'py, PyAny>,
    beta_grid: Vec<f64>,
    f_grid: Vec<f64>,
    alpha: f64,
    model: &str,
    replicates: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec: GeneratorSpec = from_py(spec)?;
    let model: FlowModel = from_name(model)?;
    let sweep = py
        .detach(|| cascade::weighted_cascade_sweep(&spec, &beta_grid, &f_grid, alpha, model, replicates, seed))
        .map_err(err)?;
    to_py(py, &sweep)
}

/// Two networks of equal size with a one-to-one dependency between them.
#[pyclass(name = "InterdependentSystem", module = "resil", frozen)]
struct PyInterdependent(interdependent::InterdependentSystem);

#[pymethods]
impl PyInterdependent {
    /// `a_to_b[i]` is the B node that A node `i` depends on (and vice versa).
    #[new]
    fn new(net_a: &PyGraph, net_b: &PyGraph, a_to_b: Vec<usize>) -> PyResult<Self> {
        interdependent::InterdependentSystem::new(net_a.0.clone(), net_b.0.clone(), a_to_b)
            .map(PyInterdependent)
            .map_err(err)
    }

    /// Couples by identity or by a seeded random permutation.
    #[staticmethod]
    #[pyo3(signature = (net_a, net_b, mode="random_permutation", seed=0))]
    fn couple(net_a: &PyGraph, net_b: &PyGraph, mode: &str, seed: u64) -> PyResult<Self> {
        let mode: CouplingMode = from_name(mode)?;
        interdependent::couple(net_a.0.clone(), net_b.0.clone(), mode, seed)
            .map(PyInterdependent)
            .map_err(err)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn net_a(&self) -> PyGraph {
        PyGraph(self.0.net_a().clone())
    }

    #[getter]
    fn net_b(&self) -> PyGraph {
        PyGraph(self.0.net_b().clone())
    }

    #[getter]
    fn a_to_b(&self) -> Vec<usize> {
        (0..self.0.node_count()).map(|a| self.0.partner_of_a(a)).collect()
    }

    /// Removes `floor(p n)` random A nodes and runs the mutual collapse.
    #[pyo3(signature = (p, seed=0))]
    fn cascade<'py>(&self, py: Python<'py>, p: f64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let result = interdependent::interdependent_cascade(&self.0, p, seed).map_err(err)?;
        to_py(py, &result)
    }

    fn cascade_from<'py>(&self, py: Python<'py>, removed_a: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        if let Some(v) = removed_a.iter().find(|&&v| v >= self.0.node_count()) {
            return Err(PyValueError::new_err(format!("node {v} out of range")));
        }
        to_py(py, &interdependent::cascade_from(&self.0, &removed_a))
    }
}

/// Mutual survivor fraction versus removed fraction; `coupling` is
/// `"identity"`, `"random_permutation"` or `"isolated"`.
#[pyfunction]
#[pyo3(signature = (spec_a, spec_b, p_grid, coupling="random_permutation", replicates=10, seed=0))]
fn pc_sweep<'py>(
    py: Python<'py>,
    spec_a: &Bound<'py, PyAny>,
    spec_b: &Bound<'py, PyAny>,
    p_grid: Vec<f64>,
    coupling: &str,
    replicates: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let (a, b): (GeneratorSpec, GeneratorSpec) = (from_py(spec_a)?, from_py(spec_b)?);
    let coupling: SweepCoupling = from_name(coupling)?;
    let curve = py
        .detach(|| interdependent::pc_sweep(&a, &b, &p_grid, coupling, replicates, seed))
        .map_err(err)?;
    to_py(py, &curve)
}

/// Agents with function repertoires and concurrent-task capacities.
#[pyclass(name = "AgentPool", module = "resil", frozen)]
struct PyAgentPool(buffering::AgentPool);

#[pymethods]
impl PyAgentPool {
    /// `agents` is a list of `(repertoire, capacity)` pairs.
    #[new]
    fn new(n_functions: usize, agents: Vec<(Vec<usize>, usize)>) -> PyResult<Self> {
        let agents = agents.into_iter().map(|(repertoire, capacity)| Agent { repertoire, capacity }).collect();
        buffering::AgentPool::new(n_functions, agents).map(PyAgentPool).map_err(err)
    }

    /// Random pool in which every agent can perform `versatility` functions.
    #[staticmethod]
    #[pyo3(signature = (n_agents, n_functions, versatility, capacity=1, seed=0))]
    fn build(n_agents: usize, n_functions: usize, versatility: usize, capacity: usize, seed: u64) -> PyResult<Self> {
        buffering::build_pool(n_agents, n_functions, versatility, capacity, seed)
            .map(PyAgentPool)
            .map_err(err)
    }

    #[getter]
    fn n_functions(&self) -> usize {
        self.0.n_functions()
    }

    #[getter]
    fn agents(&self) -> Vec<(Vec<usize>, usize)> {
        self.0.agents().iter().map(|a| (a.repertoire.clone(), a.capacity)).collect()
    }

    /// Maximum assignment of agents to the per-function demand.
    fn assign<'py>(&self, py: Python<'py>, required: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        let demand = FunctionDemand::new(required).map_err(err)?;
        to_py(py, &buffering::assign(&self.0, &demand).map_err(err)?)
    }

    /// Reassigns the demand among the agents not in `removed`.
    fn perturb_recover<'py>(&self, py: Python<'py>, required: Vec<usize>, removed: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
        let demand = FunctionDemand::new(required).map_err(err)?;
        to_py(py, &buffering::perturb_recover(&self.0, &demand, &removed).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.0.agents().len()
    }
}

/// Mean restored fraction per (versatility, capacity) cell after removing
/// `removal_fraction` of the agents; `demand` lists the required count per function.
#[pyfunction]
#[pyo3(signature = (n_agents, n_functions, versatility_grid, capacity_grid, removal_fraction, demand, replicates=10, seed=0))]
#[allow(clippy::too_many_arguments)]
fn degeneracy_sweep<'py>(
    py: Python<'py>,
    n_agents: usize,
    n_functions: usize,
    versatility_grid: Vec<usize>,
    capacity_grid: Vec<usize>,
    removal_fraction: f64,
    demand: Vec<usize>,
    replicates: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = buffering::DegeneracySpec {
        n_agents,
        n_functions,
        versatility_grid,
        capacity_grid,
        removal_fraction,
        demand: FunctionDemand::new(demand).map_err(err)?,
        replicates,
        seed,
    };
    let surface = py.detach(|| buffering::degeneracy_sweep(&spec)).map_err(err)?;
    to_py(py, &surface)
}

/// Bipartite "source asserts claim" network.
#[pyclass(name = "SourceClaimNetwork", module = "resil", frozen)]
struct PyNetwork(truth::SourceClaimNetwork);

#[pymethods]
impl PyNetwork {
    #[new]
    fn new(n_sources: usize, n_claims: usize, assertions: Vec<(usize, usize)>) -> PyResult<Self> {
        truth::SourceClaimNetwork::new(n_sources, n_claims, assertions).map(PyNetwork).map_err(err)
    }

    /// Parses `source_id,claim_id` CSV text.
    #[staticmethod]
    #[pyo3(signature = (text, n_sources=None, n_claims=None))]
    fn from_csv(text: &str, n_sources: Option<usize>, n_claims: Option<usize>) -> PyResult<Self> {
        truth::SourceClaimNetwork::from_csv(text, n_sources, n_claims).map(PyNetwork).map_err(err)
    }

    /// Samples a network from `{"n_claims", "a", "b", "d", "seed"}`; returns
    /// the network and the hidden truth labels.
    #[staticmethod]
    fn synthesize(spec: &Bound<'_, PyAny>) -> PyResult<(Self, Vec<bool>)> {
        let spec: SynthSpec = from_py(spec)?;
        truth::synth_generate(&spec).map(|(net, labels)| (PyNetwork(net), labels)).map_err(err)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    #[getter]
    fn n_sources(&self) -> usize {
        self.0.n_sources()
    }

    #[getter]
    fn n_claims(&self) -> usize {
        self.0.n_claims()
    }

    fn assertions(&self) -> Vec<(usize, usize)> {
        self.0.assertions().collect()
    }

    /// Same network with source `source`'s assertions complemented.
    fn flip_source(&self, source: usize) -> PyResult<Self> {
        truth::flip_source(&self.0, source).map(PyNetwork).map_err(err)
    }

    /// Maximum-likelihood reliabilities, with intervals when `level` is given.
    #[pyo3(signature = (options=None, level=None))]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        options: Option<&Bound<'py, PyAny>>,
        level: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let options: EmOptions = options.map(from_py).transpose()?.unwrap_or_default();
        let mut est = truth::em_estimate(&self.0, &options).map_err(err)?;
        if let Some(level) = level {
            est = truth::confidence_intervals(&est, &self.0, level).map_err(err)?;
        }
        to_py(py, &est)
    }

    #[pyo3(signature = (tol=1e-9, max_iter=1000))]
    fn iterative_rank<'py>(&self, py: Python<'py>, tol: f64, max_iter: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &truth::iterative_rank(&self.0, tol, max_iter).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "SourceClaimNetwork(sources={}, claims={}, assertions={})",
            self.0.n_sources(),
            self.0.n_claims(),
            self.0.assertion_count()
        )
    }
}

/// Claim labels and the source ranking from an estimate dict.
#[pyfunction]
#[pyo3(signature = (estimate, threshold=0.5))]
fn classify<'py>(py: Python<'py>, estimate: &Bound<'py, PyAny>, threshold: f64) -> PyResult<Bound<'py, PyAny>> {
    let est: CredibilityEstimate = from_py(estimate)?;
    to_py(py, &truth::classify_and_rerank(&est, threshold))
}

/// Robustness and resiliency of a performance trace.
#[pyfunction]
fn score_trace<'py>(
    py: Python<'py>,
    performance: Vec<f64>,
    disturbance_step: usize,
    recovery_window: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let trace = ResilienceTrace { performance, disturbance_step, recovery_window };
    to_py(py, &harness::score_trace(&trace).map_err(err)?)
}

/// Runs a scenario file into `out_dir`; returns `{"outputs", "manifest", "summary"}`.
#[pyfunction]
#[pyo3(signature = (path, out_dir, seed=None, jobs=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    path: PathBuf,
    out_dir: PathBuf,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let options = RunOptions { seed, out_dir, jobs };
    let report = py
        .detach(|| Scenario::from_file(&path).and_then(|s| harness::run_scenario(&s, &options)))
        .map_err(scenario_err)?;
    let v = serde_json::json!({
        "outputs": report.outputs,
        "manifest": report.manifest,
        "summary": report.summary,
    });
    to_py(py, &v)
}

#[pymodule]
fn resil(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyInterdependent>()?;
    m.add_class::<PyAgentPool>()?;
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(percolation_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(watts_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(load_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(degree_weighted, m)?)?;
    m.add_function(wrap_pyfunction!(mean_conductance, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_cascade_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(pc_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(degeneracy_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(score_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
