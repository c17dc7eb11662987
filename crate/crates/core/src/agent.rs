//! Mobile-agent state machine.
//!
//! The agent is launched at the origin, which is also the first node of its
//! itinerary. At every node it consumes one carried request with a local
//! invocation and drops the result into its bag, then picks the next live
//! itinerary entry, skipping faulty ones. When nothing is left it goes home
//! with the bag and the itinerary report.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cost_model::{CostParams, ObjSearch};
use crate::report::{Paradigm, ResultRecord, RunReport};
use crate::sim::{Engine, Event, NodeId, NodeSpec, Process, SimConfig, SimError, Topology, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BagGrowth {
    /// Every hop is priced the same, whatever the bag holds.
    #[default]
    Ignored,
    /// The bag travels with the agent and lengthens physical transfers.
    Carried,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReturnLeg {
    /// The agent itself migrates home: `tr + ty`.
    #[default]
    Migration,
    /// Only the results are sent home: `tr`.
    Message,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentOptions {
    pub bag_growth: BagGrowth,
    pub return_leg: ReturnLeg,
    /// Size of one node's result record; `None` uses `beta`.
    pub result_bytes: Option<f64>,
    /// Head home right after the node that holds the resource.
    pub stop_on_found: bool,
}

impl Default for AgentOptions {
    fn default() -> Self {
        Self {
            bag_growth: BagGrowth::Ignored,
            return_leg: ReturnLeg::Migration,
            result_bytes: None,
            stop_on_found: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bag {
    records: Vec<ResultRecord>,
    bytes: f64,
}

impl Bag {
    pub fn push(&mut self, record: ResultRecord) {
        self.bytes += record.bytes;
        self.records.push(record);
    }

    pub fn records(&self) -> &[ResultRecord] {
        &self.records
    }

    pub fn bytes(&self) -> f64 {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub code_size: f64,
    pub bag: Bag,
    pub itinerary: Vec<NodeId>,
    pub visited: Vec<NodeId>,
    pub skipped: Vec<NodeId>,
    pub current_node: NodeId,
    pub hops: u64,
    /// Itinerary index to consider next.
    pub next_index: usize,
}

impl AgentState {
    /// A fresh agent sitting at `itinerary[0]`.
    pub fn new(code_size: f64, itinerary: Vec<NodeId>) -> Result<Self, SimError> {
        let &first = itinerary.first().ok_or(SimError::EmptyItinerary)?;
        Ok(Self {
            code_size,
            bag: Bag::default(),
            itinerary,
            visited: Vec::new(),
            skipped: Vec::new(),
            current_node: first,
            hops: 0,
            next_index: 1,
        })
    }

    fn payload(&self, growth: BagGrowth) -> f64 {
        match growth {
            BagGrowth::Ignored => self.code_size,
            BagGrowth::Carried => self.code_size + self.bag.bytes(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextHop {
    Node(NodeId),
    ReturnToOrigin,
}

/// First remaining itinerary entry that is up. Faulty entries passed over on
/// the way are recorded as skipped.
pub fn next_hop(state: &mut AgentState, topology: &Topology) -> Result<NextHop, SimError> {
    while let Some(&id) = state.itinerary.get(state.next_index) {
        state.next_index += 1;
        if topology.node(id)?.is_up() {
            return Ok(NextHop::Node(id));
        }
        state.skipped.push(id);
    }
    Ok(NextHop::ReturnToOrigin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOutcome {
    pub cost: f64,
    pub time: f64,
}

/// One local invocation at `node`: its result joins the bag.
pub fn execute_locally(
    state: &mut AgentState,
    node: &NodeSpec,
    obj_search: ObjSearch,
    result_bytes: f64,
) -> Result<LocalOutcome, SimError> {
    if !node.is_up() {
        return Err(SimError::ExecuteAtFaulty(node.id));
    }
    if state.current_node != node.id {
        return Err(SimError::InvalidSetting(format!(
            "agent is at {} but was asked to execute at {}",
            state.current_node, node.id
        )));
    }
    let time = match obj_search {
        ObjSearch::PerNode => node.search_time,
        ObjSearch::Once if state.visited.is_empty() => node.search_time,
        ObjSearch::Once | ObjSearch::Negligible => 0.0,
    };
    state.visited.push(node.id);
    state.bag.push(ResultRecord {
        node: node.id,
        bytes: result_bytes,
    });
    Ok(LocalOutcome {
        cost: node.local_invocation_cost,
        time,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaEvent {
    Arrive(NodeId),
    ExecDone,
    Home,
}

struct AgentRun<'a> {
    topology: &'a Topology,
    params: &'a CostParams,
    config: &'a SimConfig,
    options: &'a AgentOptions,
    state: AgentState,
    report: RunReport,
}

impl AgentRun<'_> {
    fn charge(&mut self, engine: &mut Engine<MaEvent>, node: NodeId, what: String, bytes: f64, cost: f64) {
        engine.record(node, what, bytes, cost);
        self.report.bytes_on_wire += bytes;
        self.report.invocation_cost += cost;
    }

    fn result_bytes(&self) -> f64 {
        self.options.result_bytes.unwrap_or(self.params.beta)
    }

    fn hop_time(&self) -> f64 {
        self.params.tr + self.params.ty
    }
}

impl Process for AgentRun<'_> {
    type Event = MaEvent;

    fn handle(&mut self, event: Event<MaEvent>, engine: &mut Engine<MaEvent>) -> Result<(), SimError> {
        match event.kind {
            MaEvent::Arrive(id) => {
                self.state.current_node = id;
                let node = self.topology.node(id)?;
                let result_bytes = self.result_bytes();
                let outcome = execute_locally(&mut self.state, node, self.config.obj_search, result_bytes)?;
                // The carried request is consumed here together with the local call.
                let alpha = self.params.alpha;
                self.charge(engine, id, "MA execute".into(), 0.0, alpha + outcome.cost);
                self.report.local_invocations += 1;
                self.report.found |= node.holds_resource;
                engine.schedule_in(outcome.time, MaEvent::ExecDone)?;
            }
            MaEvent::ExecDone => {
                let here = self.state.current_node;
                let done = self.options.stop_on_found && self.topology.node(here)?.holds_resource;
                let next = if done {
                    NextHop::ReturnToOrigin
                } else {
                    next_hop(&mut self.state, self.topology)?
                };
                match next {
                    NextHop::Node(to) => {
                        let bytes = self.state.payload(self.options.bag_growth);
                        self.charge(engine, here, format!("MA migrate -> {to}"), bytes, 0.0);
                        self.state.hops += 1;
                        self.report.hops += 1;
                        self.report.messages += 1;
                        let d = self
                            .config
                            .leg(engine, self.topology, here, to, bytes, self.hop_time())?;
                        engine.schedule_in(d, MaEvent::Arrive(to))?;
                    }
                    NextHop::ReturnToOrigin => {
                        let origin = self.topology.origin();
                        let (bytes, fixed) = match self.options.return_leg {
                            ReturnLeg::Migration => (self.state.payload(self.options.bag_growth), self.hop_time()),
                            ReturnLeg::Message => (
                                self.state.payload(self.options.bag_growth) - self.state.code_size,
                                self.params.tr,
                            ),
                        };
                        let alpha = self.params.alpha;
                        self.charge(engine, here, format!("MA return -> {origin}"), bytes, alpha);
                        self.report.messages += 1;
                        let d = self.config.leg(engine, self.topology, here, origin, bytes, fixed)?;
                        engine.schedule_in(d, MaEvent::Home)?;
                    }
                }
            }
            MaEvent::Home => {
                let origin = self.topology.origin();
                self.state.current_node = origin;
                engine.record(origin, "MA report delivered", 0.0, 0.0);
            }
        }
        Ok(())
    }
}

/// Dispatches one agent along `itinerary`, which must begin at the origin.
pub fn run_agent(
    topology: &Topology,
    params: &CostParams,
    itinerary: &[NodeId],
    config: &SimConfig,
    options: &AgentOptions,
) -> Result<RunReport, SimError> {
    config.check(params)?;
    if let Some(b) = options.result_bytes {
        if !(b.is_finite() && b >= 0.0) {
            return Err(SimError::InvalidSetting(format!("result_bytes {b} must be >= 0")));
        }
    }
    let &first = itinerary.first().ok_or(SimError::EmptyItinerary)?;
    let origin = topology.origin();
    if first != origin {
        return Err(SimError::ItineraryOrigin { origin, first });
    }
    let mut seen = HashSet::new();
    for &id in itinerary {
        topology.node(id)?;
        if !seen.insert(id) {
            return Err(SimError::DuplicateStop(id));
        }
    }

    let mut run = AgentRun {
        topology,
        params,
        config,
        options,
        state: AgentState::new(params.code_size, itinerary.to_vec())?,
        report: RunReport::empty(Paradigm::MA, itinerary.len() as u64),
    };
    let mut engine = Engine::new(config.seed).with_max_events(config.max_events);
    // One network invocation ships the code with every request on board.
    run.charge(&mut engine, origin, "MA launch".into(), 0.0, params.code_size);
    run.report.remote_invocations = 1;
    engine.schedule(0.0, MaEvent::Arrive(origin))?;
    let (clock, trace): (f64, Trace) = engine.run_until_idle(&mut run)?;

    let AgentRun { state, mut report, .. } = run;
    report.comm_time = clock;
    report.trace = trace;
    report.results = state.bag.len() as u64;
    report.visited = state.visited;
    report.skipped = state.skipped;
    report.bag = state.bag.records;
    Ok(report)
}

/// `[origin, s1, .., s(n-1)]` over the uniform topology's servers.
pub fn default_itinerary(topology: &Topology, n: usize) -> Vec<NodeId> {
    std::iter::once(topology.origin())
        .chain(topology.servers())
        .take(n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::{ma_comm_time, ma_invocation_cost};
    use crate::sim::{Bandwidth, NodeStatus, TimingMode};

    fn setup(n: usize, p: &CostParams) -> (Topology, Vec<NodeId>) {
        let t = Topology::uniform(n, p, 1.0, Bandwidth::Infinite).unwrap();
        let it = default_itinerary(&t, n);
        (t, it)
    }

    #[test]
    fn time_over_five_nodes() {
        let p = CostParams {
            tr: 1.0,
            ty: 2.0,
            ..CostParams::zero()
        };
        let (t, it) = setup(5, &p);
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &AgentOptions::default()).unwrap();
        assert_eq!(r.comm_time, 15.0);
        assert_eq!(r.hops, 4);
        assert_eq!(r.messages, 5);
        assert_eq!(r.remote_invocations, 1);
        assert_eq!(r.local_invocations, 5);
    }

    #[test]
    fn cost_over_four_nodes() {
        let p = CostParams {
            alpha: 100.0,
            sigma: 1.0,
            code_size: 500.0,
            ..CostParams::zero()
        };
        let (t, it) = setup(4, &p);
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &AgentOptions::default()).unwrap();
        assert_eq!(r.invocation_cost, 1004.0);
        assert_eq!(r.invocation_cost, ma_invocation_cost(&p, 4).unwrap());
    }

    #[test]
    fn single_node_run() {
        let p = CostParams::default();
        let (t, it) = setup(1, &p);
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &AgentOptions::default()).unwrap();
        assert_eq!(r.comm_time, ma_comm_time(&p, 1, true).unwrap());
        assert_eq!(r.hops, 0);
    }

    #[test]
    fn message_return_costs_tr_only() {
        let p = CostParams {
            tr: 1.0,
            ty: 2.0,
            ..CostParams::zero()
        };
        let (t, it) = setup(5, &p);
        let opts = AgentOptions {
            return_leg: ReturnLeg::Message,
            ..AgentOptions::default()
        };
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &opts).unwrap();
        assert_eq!(r.comm_time, ma_comm_time(&p, 5, false).unwrap() + 1.0);
    }

    #[test]
    fn next_hop_walks_itinerary() {
        let p = CostParams::zero();
        let (mut t, _) = setup(3, &p);
        let it = vec![NodeId(0), NodeId(1), NodeId(2)];
        let mut s = AgentState::new(0.0, it.clone()).unwrap();
        assert_eq!(next_hop(&mut s, &t).unwrap(), NextHop::Node(NodeId(1)));

        t.set_status(NodeId(1), NodeStatus::Faulty).unwrap();
        let mut s = AgentState::new(0.0, it.clone()).unwrap();
        assert_eq!(next_hop(&mut s, &t).unwrap(), NextHop::Node(NodeId(2)));
        assert_eq!(s.skipped, vec![NodeId(1)]);

        t.set_status(NodeId(2), NodeStatus::Faulty).unwrap();
        let mut s = AgentState::new(0.0, it).unwrap();
        assert_eq!(next_hop(&mut s, &t).unwrap(), NextHop::ReturnToOrigin);
        assert_eq!(s.skipped, vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn execute_locally_accounting() {
        let mut s = AgentState::new(0.0, vec![NodeId(0), NodeId(1), NodeId(2)]).unwrap();
        let mut total = 0.0;
        for i in 0..3 {
            s.current_node = NodeId(i);
            let out = execute_locally(&mut s, &NodeSpec::up(i, 0.0, 1.0), ObjSearch::Negligible, 10.0).unwrap();
            assert_eq!(out.cost, 1.0);
            total += out.cost;
            assert_eq!(s.bag.len(), i + 1);
        }
        assert_eq!(total, 3.0);

        let mut s = AgentState::new(0.0, vec![NodeId(0)]).unwrap();
        let out = execute_locally(&mut s, &NodeSpec::up(0, 0.0, 0.0), ObjSearch::PerNode, 0.0).unwrap();
        assert_eq!(out, LocalOutcome { cost: 0.0, time: 0.0 });
        assert_eq!(s.bag.len(), 1);

        let mut bad = NodeSpec::up(0, 0.0, 0.0);
        bad.status = NodeStatus::Faulty;
        let mut s = AgentState::new(0.0, vec![NodeId(0)]).unwrap();
        assert_eq!(
            execute_locally(&mut s, &bad, ObjSearch::Negligible, 0.0),
            Err(SimError::ExecuteAtFaulty(NodeId(0)))
        );
    }

    #[test]
    fn carried_bag_slows_physical_hops() {
        let p = CostParams {
            code_size: 200.0,
            ..CostParams::zero()
        };
        let t = Topology::uniform(1, &p, 0.0, Bandwidth::Finite(100.0)).unwrap();
        let it = default_itinerary(&t, 2);
        let cfg = SimConfig {
            timing: TimingMode::Physical,
            ..SimConfig::default()
        };
        let ignored = AgentOptions {
            result_bytes: Some(100.0),
            ..AgentOptions::default()
        };
        let carried = AgentOptions {
            bag_growth: BagGrowth::Carried,
            ..ignored.clone()
        };
        let a = run_agent(&t, &p, &it, &cfg, &ignored).unwrap();
        let b = run_agent(&t, &p, &it, &cfg, &carried).unwrap();
        // Ignored: 200/100 out + 200/100 back. Carried: 300/100 out + 400/100 back.
        assert_eq!(a.comm_time, 4.0);
        assert_eq!(b.comm_time, 7.0);
    }

    #[test]
    fn bag_lists_visits_in_order() {
        let p = CostParams::default();
        let (mut t, it) = setup(5, &p);
        t.set_status(NodeId(2), NodeStatus::Faulty).unwrap();
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &AgentOptions::default()).unwrap();
        let bag_nodes: Vec<_> = r.bag.iter().map(|b| b.node).collect();
        assert_eq!(bag_nodes, r.visited);
        assert_eq!(r.visited, vec![NodeId(0), NodeId(1), NodeId(3), NodeId(4)]);
        assert_eq!(r.skipped, vec![NodeId(2)]);
    }

    #[test]
    fn stop_on_found_returns_early() {
        let p = CostParams {
            tr: 1.0,
            ty: 1.0,
            ..CostParams::zero()
        };
        let (mut t, it) = setup(5, &p);
        t.set_resource(Some(NodeId(2))).unwrap();
        let opts = AgentOptions {
            stop_on_found: true,
            ..AgentOptions::default()
        };
        let r = run_agent(&t, &p, &it, &SimConfig::default(), &opts).unwrap();
        assert!(r.found);
        assert_eq!(r.visited.len(), 3);
        assert_eq!(r.comm_time, ma_comm_time(&p, 3, true).unwrap());
    }

    #[test]
    fn rejects_bad_itineraries() {
        let p = CostParams::default();
        let (t, _) = setup(3, &p);
        let (c, o) = (SimConfig::default(), AgentOptions::default());
        assert_eq!(run_agent(&t, &p, &[], &c, &o).unwrap_err(), SimError::EmptyItinerary);
        assert!(matches!(
            run_agent(&t, &p, &[NodeId(1)], &c, &o),
            Err(SimError::ItineraryOrigin { .. })
        ));
        assert!(run_agent(&t, &p, &[NodeId(0), NodeId(9)], &c, &o).is_err());
        assert!(run_agent(&t, &p, &[NodeId(0), NodeId(1), NodeId(1)], &c, &o).is_err());
    }
}
