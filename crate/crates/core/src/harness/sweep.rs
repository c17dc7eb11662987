use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, HarnessError, SweepVar};
use crate::agent::{default_itinerary, run_agent};
use crate::cost_model::{self, CostParams};
use crate::remoting::run_remoting;
use crate::report::{Paradigm, RunReport};
use crate::sim::{NodeId, NodeStatus, SimRng, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub paradigm: Paradigm,
    pub sweep_value: f64,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub csv_path: PathBuf,
    pub script_path: PathBuf,
}

/// One CSV data row, columns in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub paradigm: Paradigm,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub n: u64,
    pub comm_time: f64,
    pub invocation_cost: f64,
    pub messages: u64,
    pub bytes_on_wire: f64,
    pub remote_invocations: u64,
    pub local_invocations: u64,
    pub hops: u64,
    pub found: bool,
}

impl CsvRow {
    fn new(var: SweepVar, point: &SweepPoint) -> Self {
        let r = &point.report;
        Self {
            paradigm: point.paradigm,
            sweep_var: var.name().to_string(),
            sweep_value: point.sweep_value,
            n: r.n,
            comm_time: r.comm_time,
            invocation_cost: r.invocation_cost,
            messages: r.messages,
            bytes_on_wire: r.bytes_on_wire,
            remote_invocations: r.remote_invocations,
            local_invocations: r.local_invocations,
            hops: r.hops,
            found: r.found,
        }
    }
}

/// Parameters and node count in effect at one sweep point.
pub fn params_at(spec: &ExperimentSpec, value: f64) -> (CostParams, u64) {
    let mut p = spec.fixed;
    let mut n = spec.topology.n_servers;
    match spec.sweep.var.param_field() {
        Some(field) => *p.field_mut(field).expect("sweep variables name real fields") = value,
        None => n = value as u64,
    }
    (p, n)
}

fn build_topology(spec: &ExperimentSpec, p: &CostParams, n: u64) -> Result<Topology, HarnessError> {
    let ts = &spec.topology;
    let mut topology = Topology::uniform(n as usize, p, ts.latency, ts.bandwidth)?;
    // Failures are sampled node by node from a fresh stream, so a server's
    // status does not depend on how many servers the point has.
    if ts.failure_prob > 0.0 {
        let mut rng = SimRng::seeded(spec.sim.seed);
        topology.sample_failures(&mut rng, ts.failure_prob);
    }
    for &id in ts.faulty.iter().filter(|&&id| id <= n as usize) {
        topology.set_status(NodeId(id), NodeStatus::Faulty)?;
    }
    if let Some(id) = ts.resource_at.filter(|&id| id <= n as usize) {
        topology.set_resource(Some(NodeId(id)))?;
    }
    Ok(topology)
}

/// Simulates one paradigm at one sweep value.
pub fn run_point(spec: &ExperimentSpec, paradigm: Paradigm, value: f64) -> Result<RunReport, HarnessError> {
    let (p, n) = params_at(spec, value);
    let topology = build_topology(spec, &p, n)?;
    let report = match paradigm {
        Paradigm::DNR => run_remoting(&topology, &p, &topology.servers(), &spec.sim, &spec.remoting)?,
        Paradigm::MA => {
            let itinerary = default_itinerary(&topology, n as usize);
            run_agent(&topology, &p, &itinerary, &spec.sim, &spec.agent)?
        }
    };
    Ok(report)
}

/// Every (paradigm, sweep value) point, ordered by paradigm then value
/// whether or not the points run in parallel.
pub fn collect_reports(spec: &ExperimentSpec, parallel: bool) -> Result<Vec<SweepPoint>, HarnessError> {
    spec.validate()?;
    let values = spec.sweep.values();
    let jobs: Vec<(Paradigm, f64)> = spec
        .paradigms
        .iter()
        .flat_map(|&p| values.iter().map(move |&v| (p, v)))
        .collect();
    let run = |&(paradigm, sweep_value): &(Paradigm, f64)| {
        run_point(spec, paradigm, sweep_value).map(|report| SweepPoint {
            paradigm,
            sweep_value,
            report,
        })
    };
    if parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    }
}

pub fn write_csv<W: std::io::Write>(var: SweepVar, points: &[SweepPoint], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for point in points {
        w.serialize(CsvRow::new(var, point))?;
    }
    w.flush().map_err(|e| HarnessError::Io {
        path: "<csv>".into(),
        source: e,
    })?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<CsvRow>, _>>()?)
}

/// A gnuplot script drawing time and cost against the swept variable for
/// every paradigm present in `csv_name`.
pub fn gnuplot_script(var: SweepVar, csv_name: &str, paradigms: &[Paradigm]) -> String {
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str("set key left top\n");
    s.push_str(&format!("set xlabel '{}'\n", var.name()));
    for (column, label, suffix) in [(5, "communication time", "comm_time"), (6, "invocation cost", "cost")] {
        s.push_str(&format!("set output '{stem}_{suffix}.png'\n"));
        s.push_str(&format!("set ylabel '{label}'\n"));
        let plots: Vec<String> = paradigms
            .iter()
            .map(|p| {
                format!(
                    "'{csv_name}' every ::1 using (strcol(1) eq '{p}' ? $3 : 1/0):{column} with linespoints title '{p}'"
                )
            })
            .collect();
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    }
    s
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io = |e| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let tmp = path.with_extension("partial");
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Runs the sweep and writes `<out_dir>/<csv_name>` plus a gnuplot script
/// next to it. Nothing is written unless every point succeeds.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepOutput, HarnessError> {
    let points = collect_reports(spec, true)?;
    let mut buf = Vec::new();
    write_csv(spec.sweep.var, &points, &mut buf)?;
    let script = gnuplot_script(spec.sweep.var, &spec.csv_name, &spec.paradigms);

    fs::create_dir_all(&spec.out_dir).map_err(|e| HarnessError::Io {
        path: spec.out_dir.display().to_string(),
        source: e,
    })?;
    let csv_path = spec.out_dir.join(&spec.csv_name);
    let script_path = csv_path.with_extension("gp");
    write_atomically(&csv_path, &buf)?;
    if let Err(e) = write_atomically(&script_path, script.as_bytes()) {
        let _ = fs::remove_file(&csv_path);
        return Err(e);
    }
    Ok(SweepOutput {
        points,
        csv_path,
        script_path,
    })
}

/// Every closed-form quantity at `n`, labelled.
pub fn predict(p: &CostParams, n: u64) -> Result<Vec<(&'static str, f64)>, HarnessError> {
    use cost_model::*;
    p.validate()?;
    Ok(vec![
        ("dnr_time_single_request", dnr_comm_time(p, 1, ObjSearch::Once)?),
        ("dnr_time_search_once", dnr_comm_time(p, n, ObjSearch::Once)?),
        ("dnr_time_search_per_node", dnr_comm_time(p, n, ObjSearch::PerNode)?),
        ("dnr_time", dnr_comm_time(p, n, ObjSearch::Negligible)?),
        ("ma_time_single_hop", p.tr + p.ty),
        ("ma_time_no_return", ma_comm_time(p, n, false)?),
        ("ma_time", ma_comm_time(p, n, true)?),
        ("dnr_cost_split_sizes", dnr_invocation_cost_split(p, n, false)?),
        ("dnr_cost_no_proxy", dnr_invocation_cost(p, n, false)?),
        ("dnr_cost", dnr_invocation_cost(p, n, true)?),
        ("ma_cost_split_sizes", ma_invocation_cost_split(p, n)?),
        ("ma_cost", ma_invocation_cost(p, n)?),
    ])
}
