//! Python bindings for `agentcost`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use agentcost::cost_model::{self, CrossoverKind, CrossoverResult, ModelError};
use agentcost::harness::{self, ExperimentSpec, HarnessError, SweepVar};
use agentcost::sim::{Bandwidth, SimError};
use agentcost::{BagGrowth, CostParams, ObjSearch, Paradigm, ReturnLeg, RunReport, TimingMode};

fn model_err(e: ModelError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_err(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Config { .. } | HarnessError::Refused(_) | HarnessError::Model(_) => {
            PyValueError::new_err(e.to_string())
        }
        HarnessError::Sim(SimError::Model(_) | SimError::InvalidSetting(_) | SimError::InvalidTopology(_)) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pick<T: Copy>(what: &str, value: &str, options: &[(&str, T)]) -> PyResult<T> {
    options
        .iter()
        .find(|(name, _)| *name == value)
        .map(|&(_, t)| t)
        .ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            PyValueError::new_err(format!("{what}: expected one of {}, got {value:?}", names.join(", ")))
        })
}

fn obj_search(value: &str) -> PyResult<ObjSearch> {
    pick(
        "obj_search",
        value,
        &[
            ("negligible", ObjSearch::Negligible),
            ("once", ObjSearch::Once),
            ("per_node", ObjSearch::PerNode),
        ],
    )
}

/// Model parameters. Defaults are the calibrated set.
#[pyclass(name = "CostParams", module = "agentcost", from_py_object)]
#[derive(Clone)]
struct PyCostParams {
    inner: CostParams,
}

#[pymethods]
impl PyCostParams {
    #[new]
    #[pyo3(signature = (*, tr=None, ty=None, t_obj=None, t_proxy=None, alpha=None, beta=None, psi=None, sigma=None, code_size=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        tr: Option<f64>,
        ty: Option<f64>,
        t_obj: Option<f64>,
        t_proxy: Option<f64>,
        alpha: Option<f64>,
        beta: Option<f64>,
        psi: Option<f64>,
        sigma: Option<f64>,
        code_size: Option<f64>,
    ) -> PyResult<Self> {
        let d = CostParams::default();
        let inner = CostParams {
            tr: tr.unwrap_or(d.tr),
            ty: ty.unwrap_or(d.ty),
            t_obj: t_obj.unwrap_or(d.t_obj),
            t_proxy: t_proxy.unwrap_or(d.t_proxy),
            alpha: alpha.unwrap_or(d.alpha),
            beta: beta.unwrap_or(d.beta),
            psi: psi.unwrap_or(d.psi),
            sigma: sigma.unwrap_or(d.sigma),
            code_size: code_size.unwrap_or(d.code_size),
        };
        inner.validate().map_err(model_err)?;
        Ok(Self { inner })
    }

    /// Every parameter zero.
    #[staticmethod]
    fn zero() -> Self {
        Self {
            inner: CostParams::zero(),
        }
    }

    fn to_dict(&self) -> Vec<(&'static str, f64)> {
        self.inner.fields().to_vec()
    }

    fn __getattr__(&self, name: &str) -> PyResult<f64> {
        self.inner
            .fields()
            .iter()
            .find(|(field, _)| *field == name)
            .map(|&(_, v)| v)
            .ok_or_else(|| pyo3::exceptions::PyAttributeError::new_err(name.to_string()))
    }

    fn __setattr__(&mut self, name: &str, value: f64) -> PyResult<()> {
        let mut next = self.inner;
        *next
            .field_mut(name)
            .ok_or_else(|| pyo3::exceptions::PyAttributeError::new_err(name.to_string()))? = value;
        next.validate().map_err(model_err)?;
        self.inner = next;
        Ok(())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let fields: Vec<String> = self.inner.fields().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("CostParams({})", fields.join(", "))
    }
}

fn params_or_default(p: Option<PyCostParams>) -> CostParams {
    p.map(|p| p.inner).unwrap_or_default()
}

/// Outcome of one simulated run.
#[pyclass(name = "RunReport", module = "agentcost", frozen, get_all)]
struct PyRunReport {
    paradigm: String,
    n: u64,
    comm_time: f64,
    invocation_cost: f64,
    messages: u64,
    bytes_on_wire: f64,
    remote_invocations: u64,
    local_invocations: u64,
    hops: u64,
    timeouts: u64,
    found: bool,
    visited: Vec<usize>,
    skipped: Vec<usize>,
    trace: String,
}

impl From<RunReport> for PyRunReport {
    fn from(r: RunReport) -> Self {
        Self {
            paradigm: r.paradigm.to_string(),
            n: r.n,
            comm_time: r.comm_time,
            invocation_cost: r.invocation_cost,
            messages: r.messages,
            bytes_on_wire: r.bytes_on_wire,
            remote_invocations: r.remote_invocations,
            local_invocations: r.local_invocations,
            hops: r.hops,
            timeouts: r.timeouts,
            found: r.found,
            visited: r.visited.iter().map(|id| id.0).collect(),
            skipped: r.skipped.iter().map(|id| id.0).collect(),
            trace: r.trace.to_text(),
        }
    }
}

#[pymethods]
impl PyRunReport {
    fn __repr__(&self) -> String {
        format!(
            "RunReport(paradigm={}, n={}, comm_time={}, invocation_cost={}, visited={}, skipped={})",
            self.paradigm,
            self.n,
            self.comm_time,
            self.invocation_cost,
            self.visited.len(),
            self.skipped.len()
        )
    }
}

/// Where MA stops being worse than DNR.
#[pyclass(name = "Crossover", module = "agentcost", frozen, get_all)]
struct PyCrossover {
    /// "always_ma", "always_dnr", "tie" or "threshold".
    kind: &'static str,
    threshold: Option<u64>,
    margin: f64,
    n_independent: bool,
    reverts_at: Option<u64>,
}

impl From<CrossoverResult> for PyCrossover {
    fn from(c: CrossoverResult) -> Self {
        let (kind, threshold) = match c.kind {
            CrossoverKind::AlwaysMA => ("always_ma", None),
            CrossoverKind::AlwaysDNR => ("always_dnr", None),
            CrossoverKind::Tie => ("tie", None),
            CrossoverKind::ThresholdAt(n) => ("threshold", Some(n)),
        };
        Self {
            kind,
            threshold,
            margin: c.margin_at_threshold,
            n_independent: c.n_independent,
            reverts_at: c.reverts_at,
        }
    }
}

#[pymethods]
impl PyCrossover {
    fn __repr__(&self) -> String {
        format!(
            "Crossover(kind={:?}, threshold={:?}, margin={})",
            self.kind, self.threshold, self.margin
        )
    }
}

#[pyfunction]
#[pyo3(signature = (params, n, obj_search="negligible"))]
fn dnr_comm_time(params: PyCostParams, n: u64, obj_search: &str) -> PyResult<f64> {
    cost_model::dnr_comm_time(&params.inner, n, self::obj_search(obj_search)?).map_err(model_err)
}

#[pyfunction]
#[pyo3(signature = (params, n, include_return=true))]
fn ma_comm_time(params: PyCostParams, n: u64, include_return: bool) -> PyResult<f64> {
    cost_model::ma_comm_time(&params.inner, n, include_return).map_err(model_err)
}

#[pyfunction]
#[pyo3(signature = (params, n, with_proxy=true))]
fn dnr_invocation_cost(params: PyCostParams, n: u64, with_proxy: bool) -> PyResult<f64> {
    cost_model::dnr_invocation_cost(&params.inner, n, with_proxy).map_err(model_err)
}

#[pyfunction]
fn ma_invocation_cost(params: PyCostParams, n: u64) -> PyResult<f64> {
    cost_model::ma_invocation_cost(&params.inner, n).map_err(model_err)
}

#[pyfunction]
#[pyo3(signature = (params=None))]
fn comm_crossover(params: Option<PyCostParams>) -> PyCrossover {
    cost_model::comm_crossover(&params_or_default(params)).into()
}

#[pyfunction]
#[pyo3(signature = (params=None))]
fn cost_crossover(params: Option<PyCostParams>) -> PyResult<PyCrossover> {
    Ok(cost_model::cost_crossover(&params_or_default(params))
        .map_err(model_err)?
        .into())
}

/// `(time_winner, cost_winner, overall)` at `n`.
#[pyfunction]
#[pyo3(signature = (n, params=None))]
fn classify_regime(n: u64, params: Option<PyCostParams>) -> PyResult<(String, String, String)> {
    let r = cost_model::classify_regime(&params_or_default(params), n).map_err(model_err)?;
    Ok((
        r.time_winner.to_string(),
        r.cost_winner.to_string(),
        r.overall.to_string(),
    ))
}

type RegimeRowTuple = (String, f64, u64, f64, String, String, String);

/// Rows of `(axis, value, n, alpha, time_winner, cost_winner, overall)`.
#[pyfunction]
#[pyo3(signature = (params=None, n_rows=None, size_rows=None, size_n=harness::CALIBRATED_SIZE_N))]
fn regime_table(
    params: Option<PyCostParams>,
    n_rows: Option<Vec<u64>>,
    size_rows: Option<Vec<f64>>,
    size_n: u64,
) -> PyResult<Vec<RegimeRowTuple>> {
    let defaults = harness::RegimeSpec::default();
    let table = harness::regime_table(
        &params_or_default(params),
        &n_rows.unwrap_or(defaults.n_rows),
        &size_rows.unwrap_or(defaults.size_rows),
        size_n,
    )
    .map_err(harness_err)?;
    Ok(table
        .rows
        .into_iter()
        .map(|r| {
            (
                r.axis.to_string(),
                r.value,
                r.n,
                r.alpha,
                r.regime.time_winner.to_string(),
                r.regime.cost_winner.to_string(),
                r.regime.overall.to_string(),
            )
        })
        .collect())
}

/// Runs one paradigm ("DNR" or "MA") over `n` nodes of a uniform topology.
#[pyfunction]
#[pyo3(signature = (
    paradigm, n, params=None, *, faulty=Vec::new(), mode="fixed", obj_search="negligible",
    seed=0, jitter=0.0, latency=1.0, bandwidth=None, resource_at=None, stop_on_found=false,
    bag_growth="ignored", return_leg="migration", timeout_factor=2.0,
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    paradigm: &str,
    n: u64,
    params: Option<PyCostParams>,
    faulty: Vec<usize>,
    mode: &str,
    obj_search: &str,
    seed: u64,
    jitter: f64,
    latency: f64,
    bandwidth: Option<f64>,
    resource_at: Option<usize>,
    stop_on_found: bool,
    bag_growth: &str,
    return_leg: &str,
    timeout_factor: f64,
) -> PyResult<PyRunReport> {
    let paradigm: Paradigm = paradigm.parse().map_err(PyValueError::new_err)?;
    let mut spec = ExperimentSpec {
        fixed: params_or_default(params),
        ..ExperimentSpec::default()
    };
    spec.sweep.var = SweepVar::NServers;
    spec.topology.faulty = faulty;
    spec.topology.latency = latency;
    spec.topology.bandwidth = bandwidth.map_or(Bandwidth::Infinite, Bandwidth::Finite);
    spec.topology.resource_at = resource_at;
    spec.sim.timing = pick(
        "mode",
        mode,
        &[("fixed", TimingMode::FixedHop), ("physical", TimingMode::Physical)],
    )?;
    spec.sim.obj_search = self::obj_search(obj_search)?;
    spec.sim.seed = seed;
    spec.sim.jitter = jitter;
    spec.remoting.stop_on_found = stop_on_found;
    spec.remoting.timeout_factor = timeout_factor;
    spec.agent.stop_on_found = stop_on_found;
    spec.agent.bag_growth = pick(
        "bag_growth",
        bag_growth,
        &[("ignored", BagGrowth::Ignored), ("carried", BagGrowth::Carried)],
    )?;
    spec.agent.return_leg = pick(
        "return_leg",
        return_leg,
        &[("migration", ReturnLeg::Migration), ("message", ReturnLeg::Message)],
    )?;
    spec.validate().map_err(harness_err)?;
    let report = harness::run_point(&spec, paradigm, n as f64).map_err(harness_err)?;
    Ok(report.into())
}

/// Runs the sweep described by `config` (experiment file text) and returns
/// the CSV it would write, without touching the file system.
#[pyfunction]
fn sweep_csv(config: &str) -> PyResult<String> {
    let spec = harness::parse_config(config).map_err(harness_err)?;
    let points = harness::collect_reports(&spec, true).map_err(harness_err)?;
    let mut buf = Vec::new();
    harness::write_csv(spec.sweep.var, &points, &mut buf).map_err(harness_err)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `(passed, max_rel_error)` for the sweep described by `config`.
#[pyfunction]
#[pyo3(signature = (config, tolerance=None))]
fn validate(config: &str, tolerance: Option<f64>) -> PyResult<(bool, f64)> {
    let spec = harness::parse_config(config).map_err(harness_err)?;
    let report = harness::validate(&spec, tolerance.unwrap_or(spec.tolerance)).map_err(harness_err)?;
    Ok((report.passed, report.max_rel_error))
}

#[pymodule]
#[pyo3(name = "agentcost")]
fn agentcost_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCostParams>()?;
    m.add_class::<PyRunReport>()?;
    m.add_class::<PyCrossover>()?;
    m.add_function(wrap_pyfunction!(dnr_comm_time, m)?)?;
    m.add_function(wrap_pyfunction!(ma_comm_time, m)?)?;
    m.add_function(wrap_pyfunction!(dnr_invocation_cost, m)?)?;
    m.add_function(wrap_pyfunction!(ma_invocation_cost, m)?)?;
    m.add_function(wrap_pyfunction!(comm_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(cost_crossover, m)?)?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(regime_table, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
