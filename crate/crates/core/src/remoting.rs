//! Remoting state machine: the client interrogates each server in turn with
//! a stop-and-wait round trip and fetches the proxy once, at first contact.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostParams, ObjSearch};
use crate::report::{Paradigm, RunReport};
use crate::sim::{Engine, Event, NodeId, Process, SimConfig, SimError, TimingMode, Topology};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemotingOptions {
    /// Stop after the response of the node that holds the resource.
    pub stop_on_found: bool,
    /// A faulty server is given up after this many one-way latencies.
    pub timeout_factor: f64,
    /// Size of the proxy download message.
    pub proxy_bytes: f64,
}

impl Default for RemotingOptions {
    fn default() -> Self {
        Self {
            stop_on_found: false,
            timeout_factor: 2.0,
            proxy_bytes: 0.0,
        }
    }
}

/// Per-server progress. Phases only move forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Pending,
    ProxyDownload,
    RequestInFlight,
    Searching,
    ResponseInFlight,
    Done,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnrEvent {
    Contact(usize),
    ProxyArrived(usize),
    RequestArrived(usize),
    SearchDone(usize),
    ResponseArrived(usize),
    TimedOut(usize),
}

pub struct RemotingRun<'a> {
    topology: &'a Topology,
    params: &'a CostParams,
    config: &'a SimConfig,
    options: &'a RemotingOptions,
    servers: Vec<NodeId>,
    phases: Vec<Phase>,
    proxy_loaded: bool,
    searched: bool,
    report: RunReport,
}

impl<'a> RemotingRun<'a> {
    fn new(
        topology: &'a Topology,
        params: &'a CostParams,
        servers: &[NodeId],
        config: &'a SimConfig,
        options: &'a RemotingOptions,
    ) -> Result<Self, SimError> {
        config.check(params)?;
        if !(options.timeout_factor.is_finite() && options.timeout_factor >= 0.0) {
            return Err(SimError::InvalidSetting(format!(
                "timeout_factor {} must be >= 0",
                options.timeout_factor
            )));
        }
        if !(options.proxy_bytes.is_finite() && options.proxy_bytes >= 0.0) {
            return Err(SimError::InvalidSetting(format!(
                "proxy_bytes {} must be >= 0",
                options.proxy_bytes
            )));
        }
        if servers.is_empty() {
            return Err(SimError::EmptyServerList);
        }
        let mut seen = HashSet::new();
        for &s in servers {
            topology.node(s)?;
            if s == topology.origin() {
                return Err(SimError::ServerIsOrigin(s));
            }
            if !seen.insert(s) {
                return Err(SimError::DuplicateStop(s));
            }
        }
        Ok(Self {
            topology,
            params,
            config,
            options,
            servers: servers.to_vec(),
            phases: vec![Phase::Pending; servers.len()],
            proxy_loaded: false,
            searched: false,
            report: RunReport::empty(Paradigm::DNR, servers.len() as u64),
        })
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    fn advance(&mut self, idx: usize, phase: Phase) {
        debug_assert!(self.phases[idx] < phase, "phase regression at server {idx}");
        self.phases[idx] = phase;
    }

    fn client(&self) -> NodeId {
        self.topology.origin()
    }

    fn charge(&mut self, engine: &mut Engine<DnrEvent>, node: NodeId, what: String, bytes: f64, cost: f64) {
        engine.record(node, what, bytes, cost);
        self.report.bytes_on_wire += bytes;
        self.report.invocation_cost += cost;
    }

    fn send_request(&mut self, idx: usize, engine: &mut Engine<DnrEvent>) -> Result<f64, SimError> {
        let server = self.servers[idx];
        self.advance(idx, Phase::RequestInFlight);
        let alpha = self.params.alpha;
        self.charge(
            engine,
            self.client(),
            format!("DNR request -> {server}"),
            alpha,
            alpha + self.params.psi,
        );
        self.report.messages += 1;
        self.report.remote_invocations += 1;
        self.config
            .leg(engine, self.topology, self.client(), server, alpha, self.params.tr)
    }

    /// A faulty server never answers: the request is spent, then the client
    /// waits `timeout_factor` one-way latencies and moves on.
    pub fn handle_faulty_server(&mut self, idx: usize, engine: &mut Engine<DnrEvent>) -> Result<(), SimError> {
        let server = self.servers[idx];
        let to_server = self.send_request(idx, engine)?;
        let one_way = match self.config.timing {
            TimingMode::FixedHop => self.params.tr,
            TimingMode::Physical => self.topology.latency(self.client(), server)?,
        };
        engine.schedule_in(
            to_server + self.options.timeout_factor * one_way,
            DnrEvent::TimedOut(idx),
        )?;
        Ok(())
    }

    fn search_time(&mut self, server: NodeId) -> Result<f64, SimError> {
        let node = self.topology.node(server)?;
        let t = match self.config.obj_search {
            ObjSearch::PerNode => node.search_time,
            ObjSearch::Once if !self.searched => node.search_time,
            ObjSearch::Once | ObjSearch::Negligible => 0.0,
        };
        self.searched = true;
        Ok(t)
    }

    fn next_server(&mut self, idx: usize, engine: &mut Engine<DnrEvent>) -> Result<(), SimError> {
        if idx + 1 < self.servers.len() {
            engine.schedule_in(0.0, DnrEvent::Contact(idx + 1))?;
        }
        Ok(())
    }

    fn finish(mut self, comm_time: f64, trace: crate::sim::Trace) -> RunReport {
        self.report.comm_time = comm_time;
        self.report.trace = trace;
        self.report
    }
}

impl Process for RemotingRun<'_> {
    type Event = DnrEvent;

    fn handle(&mut self, event: Event<DnrEvent>, engine: &mut Engine<DnrEvent>) -> Result<(), SimError> {
        match event.kind {
            DnrEvent::Contact(idx) => {
                let server = self.servers[idx];
                if !self.topology.node(server)?.is_up() {
                    return self.handle_faulty_server(idx, engine);
                }
                if self.proxy_loaded {
                    let d = self.send_request(idx, engine)?;
                    engine.schedule_in(d, DnrEvent::RequestArrived(idx))?;
                } else {
                    // The proxy costs money but no time with fixed hop times.
                    self.proxy_loaded = true;
                    self.advance(idx, Phase::ProxyDownload);
                    let bytes = self.options.proxy_bytes;
                    self.charge(
                        engine,
                        self.client(),
                        format!("DNR proxy-download <- {server}"),
                        bytes,
                        self.params.t_proxy,
                    );
                    self.report.messages += 1;
                    let d = self
                        .config
                        .leg(engine, self.topology, server, self.client(), bytes, 0.0)?;
                    engine.schedule_in(d, DnrEvent::ProxyArrived(idx))?;
                }
            }
            DnrEvent::ProxyArrived(idx) => {
                let d = self.send_request(idx, engine)?;
                engine.schedule_in(d, DnrEvent::RequestArrived(idx))?;
            }
            DnrEvent::RequestArrived(idx) => {
                let server = self.servers[idx];
                self.advance(idx, Phase::Searching);
                let t = self.search_time(server)?;
                engine.record(server, "DNR search", 0.0, 0.0);
                engine.schedule_in(t, DnrEvent::SearchDone(idx))?;
            }
            DnrEvent::SearchDone(idx) => {
                let server = self.servers[idx];
                self.advance(idx, Phase::ResponseInFlight);
                let alpha = self.params.alpha;
                self.charge(
                    engine,
                    server,
                    format!("DNR response -> {}", self.client()),
                    alpha,
                    alpha,
                );
                self.report.messages += 1;
                let d = self
                    .config
                    .leg(engine, self.topology, server, self.client(), alpha, self.params.tr)?;
                engine.schedule_in(d, DnrEvent::ResponseArrived(idx))?;
            }
            DnrEvent::ResponseArrived(idx) => {
                let server = self.servers[idx];
                self.advance(idx, Phase::Done);
                engine.record(self.client(), format!("DNR response <- {server}"), 0.0, 0.0);
                self.report.visited.push(server);
                self.report.results += 1;
                let holds = self.topology.node(server)?.holds_resource;
                self.report.found |= holds;
                if !(holds && self.options.stop_on_found) {
                    self.next_server(idx, engine)?;
                }
            }
            DnrEvent::TimedOut(idx) => {
                let server = self.servers[idx];
                self.advance(idx, Phase::TimedOut);
                engine.record(self.client(), format!("DNR timeout {server}"), 0.0, 0.0);
                self.report.skipped.push(server);
                self.report.timeouts += 1;
                self.next_server(idx, engine)?;
            }
        }
        Ok(())
    }
}

/// Runs the remoting client against `servers`, in order.
pub fn run_remoting(
    topology: &Topology,
    params: &CostParams,
    servers: &[NodeId],
    config: &SimConfig,
    options: &RemotingOptions,
) -> Result<RunReport, SimError> {
    let mut run = RemotingRun::new(topology, params, servers, config, options)?;
    let mut engine = Engine::new(config.seed).with_max_events(config.max_events);
    engine.schedule(0.0, DnrEvent::Contact(0))?;
    let (clock, trace) = engine.run_until_idle(&mut run)?;
    Ok(run.finish(clock, trace))
}
