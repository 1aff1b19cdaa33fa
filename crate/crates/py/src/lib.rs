//! Python bindings: proposal streams, accepted graphs, connectivity checks,
//! the high-degree peel, phase plans and seeded trials.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use semirandom::high_d;
use semirandom::low_d::{long_cycle_in_digraph, Digraph};
use semirandom::trial::TrialReport;
use semirandom::{
    AcceptedGraph, ConnectivityVerdict, Edge, ExperimentConfig, PlanParams, RunMode, Schedule,
    StreamMode, TrialConfig, Witness,
};

create_exception!(semirandom, SemirandomError, PyException);

fn err(e: semirandom::Error) -> PyErr {
    SemirandomError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = semirandom::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Uniform proposals without replacement (`phases = None`), or independent
/// phases of `phase_length` distinct proposals each.
#[pyclass(name = "ProposalStream")]
struct PyProposalStream {
    inner: semirandom::ProposalStream,
}

#[pymethods]
impl PyProposalStream {
    #[new]
    #[pyo3(signature = (n, seed, phases=None, phase_length=None))]
    fn new(n: u32, seed: u64, phases: Option<u32>, phase_length: Option<u64>) -> PyResult<Self> {
        let mode = match (phases, phase_length) {
            (None, None) => StreamMode::Real,
            (Some(num_phases), Some(phase_length)) => StreamMode::Auxiliary {
                num_phases,
                phase_length,
            },
            _ => {
                return Err(PyValueError::new_err(
                    "give both phases and phase_length, or neither",
                ))
            }
        };
        semirandom::ProposalStream::new(n, seed, mode)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn round(&self) -> u64 {
        self.inner.round()
    }

    /// `(round, phase, (u, v))`; raises once the stream is exhausted.
    fn next_proposal(&mut self) -> PyResult<(u64, u32, (u32, u32))> {
        let p = self.inner.next_proposal().map_err(err)?;
        Ok((p.round, p.phase, p.edge.endpoints()))
    }

    /// Up to `k` further proposals.
    fn take(&mut self, k: usize) -> Vec<(u64, u32, (u32, u32))> {
        self.inner
            .by_ref()
            .take(k)
            .map(|p| (p.round, p.phase, p.edge.endpoints()))
            .collect()
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> Option<(u64, u32, (u32, u32))> {
        self.inner
            .next()
            .map(|p| (p.round, p.phase, p.edge.endpoints()))
    }
}

/// A simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph")]
struct PyGraph {
    inner: AcceptedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: u32, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        AcceptedGraph::from_edges(n, edges)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn add_edge(&mut self, u: u32, v: u32) -> PyResult<()> {
        let e = Edge::new(u, v).map_err(err)?;
        self.inner.add_edge(e).map_err(err)
    }

    fn has_edge(&self, u: u32, v: u32) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn degree(&self, v: u32) -> PyResult<usize> {
        self.check(v)?;
        Ok(self.inner.degree(v))
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        self.check(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner
            .edges()
            .into_iter()
            .map(|e| e.endpoints())
            .collect()
    }

    /// `(vertex, degree)` of a minimum-degree vertex.
    fn min_degree(&self) -> Option<(u32, usize)> {
        self.inner.min_degree()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    /// `N(U)`: neighbors of `vertices` outside `vertices`.
    fn neighborhood(&self, vertices: Vec<u32>) -> PyResult<Vec<u32>> {
        vertices.iter().try_for_each(|&v| self.check(v))?;
        Ok(self.inner.neighborhood(&vertices))
    }

    /// Connected vertex sets of size at most `max_size` containing `v`.
    fn connected_sets(&self, v: u32, max_size: usize) -> PyResult<Vec<Vec<u32>>> {
        self.check(v)?;
        Ok(self.inner.enumerate_connected_sets(v, max_size))
    }

    fn __len__(&self) -> usize {
        self.inner.n() as usize
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={})",
            self.inner.n(),
            self.inner.edge_count()
        )
    }
}

impl PyGraph {
    fn check(&self, v: u32) -> PyResult<()> {
        if v < self.inner.n() {
            Ok(())
        } else {
            Err(err(semirandom::Error::VertexOutOfRange {
                vertex: v,
                n: self.inner.n(),
            }))
        }
    }
}

fn verdict_dict<'py>(py: Python<'py>, v: &ConnectivityVerdict) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("holds", v.holds)?;
    out.set_item("k", v.k_at_least)?;
    out.set_item("mode", v.mode.as_str())?;
    match &v.witness {
        Some(Witness::Cutset(cut)) => out.set_item("cutset", cut.clone())?,
        Some(Witness::TooSmall) => out.set_item("too_small", true)?,
        None => {}
    }
    Ok(out)
}

/// Exact test of vertex connectivity at least `d`.
#[pyfunction]
fn is_d_connected<'py>(py: Python<'py>, graph: &PyGraph, d: u32) -> PyResult<Bound<'py, PyDict>> {
    verdict_dict(py, &semirandom::is_d_connected(&graph.inner, d))
}

/// One-sided check over `samples` random vertex pairs.
#[pyfunction]
#[pyo3(signature = (graph, d, samples, seed=0))]
fn sampled_connectivity_check<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    d: u32,
    samples: u32,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    verdict_dict(
        py,
        &semirandom::sampled_connectivity_check(&graph.inner, d, samples, seed),
    )
}

/// Exact connectivity by exhaustive search (at most 12 vertices).
#[pyfunction]
fn brute_force_connectivity(graph: &PyGraph) -> PyResult<u32> {
    semirandom::brute_force_connectivity(&graph.inner).map_err(err)
}

/// Peel to the fixpoint; returns `h`, `leaves`, `retained_leaves`, `g_prime`
/// and `iterations`.
#[pyfunction]
fn peel<'py>(py: Python<'py>, graph: &PyGraph, d: u32) -> PyResult<Bound<'py, PyDict>> {
    if d < 2 {
        return Err(PyValueError::new_err("d must be at least 2"));
    }
    let r = high_d::peel(&graph.inner, d);
    let out = PyDict::new(py);
    out.set_item("h", r.h_vertices.to_vec())?;
    out.set_item("leaves", r.leaves.to_vec())?;
    out.set_item("retained_leaves", r.retained_leaves.to_vec())?;
    out.set_item("g_prime", r.g_prime.to_vec())?;
    out.set_item("iterations", r.iterations)?;
    Ok(out)
}

/// Union of the connected sets of at most 6 vertices with fewer than `d`
/// outside neighbors.
#[pyfunction]
fn find_fragile(graph: &PyGraph, d: u32) -> PyResult<Vec<u32>> {
    if d < 1 {
        return Err(PyValueError::new_err("d must be at least 1"));
    }
    Ok(high_d::find_fragile(&graph.inner, d).to_vec())
}

/// A long directed cycle (at least 3 vertices) of the digraph on `0..n`.
#[pyfunction]
#[pyo3(signature = (n, arcs, target=0))]
fn long_cycle(n: u32, arcs: Vec<(u32, u32)>, target: usize) -> PyResult<Option<Vec<u32>>> {
    if let Some(&(i, j)) = arcs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(PyValueError::new_err(format!(
            "arc ({i}, {j}) leaves 0..{n}"
        )));
    }
    Ok(long_cycle_in_digraph(&Digraph::from_arcs(n, arcs), target))
}

/// Distinct edges proposed in at least two phases of a `(phase, (u, v))` log.
#[pyfunction]
fn repeated_edge_count(log: Vec<(u32, (u32, u32))>) -> PyResult<usize> {
    let log = log
        .into_iter()
        .map(|(p, (u, v))| Edge::new(u, v).map(|e| (p, e)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Ok(semirandom::repeated_edge_count(&log))
}

#[pyfunction]
fn round_budget(n: u32, eps: f64) -> u64 {
    semirandom::round_budget(n, eps)
}

#[pyfunction]
fn edge_budget(n: u32, d: u32, eps: f64) -> u64 {
    semirandom::edge_budget(n, d, eps)
}

/// Phase plan: `t`, `b` and the `(name, length)` phases.
#[pyfunction]
#[pyo3(signature = (n, d, omega=4.0, eps=0.3, schedule="desk-scale"))]
fn phase_plan<'py>(
    py: Python<'py>,
    n: u32,
    d: u32,
    omega: f64,
    eps: f64,
    schedule: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let params = PlanParams::new(n, d, omega, eps).with_schedule(parse::<Schedule>(schedule)?);
    let plan = semirandom::make_phase_plan(params).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("t", plan.t)?;
    out.set_item("b", plan.b)?;
    let phases: Vec<(String, u64)> = plan
        .phases
        .iter()
        .map(|p| (p.name.clone(), p.length))
        .collect();
    out.set_item("phases", phases)?;
    Ok(out)
}

fn report_dict<'py>(py: Python<'py>, r: &TrialReport) -> PyResult<Bound<'py, PyDict>> {
    let row = r.to_row();
    let out = PyDict::new(py);
    out.set_item("seed", row.seed)?;
    out.set_item("n", row.n)?;
    out.set_item("d", row.d)?;
    out.set_item("mode", row.mode)?;
    out.set_item("omega", row.omega)?;
    out.set_item("eps", row.eps)?;
    out.set_item("t_budget", row.t_budget)?;
    out.set_item("b_budget", row.b_budget)?;
    out.set_item("rounds_used", row.rounds_used)?;
    out.set_item("edges_accepted", row.edges_accepted)?;
    out.set_item("stage", row.stage)?;
    out.set_item(
        "failed_stage",
        (!row.failed_stage.is_empty()).then_some(row.failed_stage),
    )?;
    out.set_item("k_tested", row.k_tested)?;
    out.set_item("connected", row.connected)?;
    out.set_item("check_mode", row.check_mode)?;
    out.set_item("witness_size", row.witness_size)?;
    out.set_item("wallclock_ms", row.wallclock_ms)?;
    out.set_item("budget_overrides", r.budget_overrides)?;
    out.set_item("diagnostics", r.diagnostics.clone())?;
    Ok(out)
}

/// One seeded trial; returns its report as a dict.
#[pyfunction]
#[pyo3(signature = (n, d, seed, omega=4.0, eps=0.3, mode="real", schedule="desk-scale", conn="auto"))]
#[allow(clippy::too_many_arguments)]
fn run_trial<'py>(
    py: Python<'py>,
    n: u32,
    d: u32,
    seed: u64,
    omega: f64,
    eps: f64,
    mode: &str,
    schedule: &str,
    conn: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = TrialConfig {
        omega,
        eps,
        mode: parse::<RunMode>(mode)?,
        schedule: parse(schedule)?,
        conn: parse(conn)?,
        ..TrialConfig::new(n, d)
    };
    let report = py
        .detach(|| semirandom::run_trial(&cfg, seed))
        .map_err(err)?;
    report_dict(py, &report)
}

/// Every `(n, d)` cell for `trials` seeds starting at `seed`; reports in
/// cell-then-seed order.
#[pyfunction]
#[pyo3(signature = (n, d, trials, seed=0, omega=4.0, eps=0.3, workers=1, wallclock=false))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    n: Vec<u32>,
    d: Vec<u32>,
    trials: u32,
    seed: u64,
    omega: f64,
    eps: f64,
    workers: usize,
    wallclock: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig {
        n,
        d,
        trials,
        seed,
        omega,
        eps,
        workers,
        wallclock,
        ..ExperimentConfig::default()
    };
    let result = py.detach(|| semirandom::run_sweep(&cfg)).map_err(err)?;
    result.reports.iter().map(|r| report_dict(py, r)).collect()
}

#[pymodule]
#[pyo3(name = "semirandom")]
fn semirandom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SemirandomError", m.py().get_type::<SemirandomError>())?;
    m.add_class::<PyProposalStream>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(is_d_connected, m)?)?;
    m.add_function(wrap_pyfunction!(sampled_connectivity_check, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_connectivity, m)?)?;
    m.add_function(wrap_pyfunction!(peel, m)?)?;
    m.add_function(wrap_pyfunction!(find_fragile, m)?)?;
    m.add_function(wrap_pyfunction!(long_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(repeated_edge_count, m)?)?;
    m.add_function(wrap_pyfunction!(round_budget, m)?)?;
    m.add_function(wrap_pyfunction!(edge_budget, m)?)?;
    m.add_function(wrap_pyfunction!(phase_plan, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    Ok(())
}
