//! Deterministic discrete-event core shared by both paradigm state machines.

mod engine;
mod topology;
mod trace;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{Engine, Event, Process, SimRng, DEFAULT_MAX_EVENTS};
pub use topology::{transfer_duration, Bandwidth, Links, NodeId, NodeSpec, NodeStatus, Topology};
pub use trace::{Trace, TraceRecord};

use crate::cost_model::{CostParams, ModelError, ObjSearch};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("event scheduled at t={at} but the clock is already at t={now}")]
    ScheduleInPast { at: f64, now: f64 },
    #[error("runaway simulation: more than {limit} events processed")]
    Runaway { limit: u64 },
    #[error("no seed event was scheduled")]
    NothingScheduled,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("origin {0} is not part of the topology")]
    OriginMissing(NodeId),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("no servers to interrogate")]
    EmptyServerList,
    #[error("server list contains the origin {0}")]
    ServerIsOrigin(NodeId),
    #[error("itinerary is empty")]
    EmptyItinerary,
    #[error("itinerary must start at the origin {origin}, not {first}")]
    ItineraryOrigin { origin: NodeId, first: NodeId },
    #[error("node {0} appears twice in the itinerary")]
    DuplicateStop(NodeId),
    #[error("agent asked to execute at faulty node {0}")]
    ExecuteAtFaulty(NodeId),
    #[error("invalid simulation setting: {0}")]
    InvalidSetting(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How transfer times are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimingMode {
    /// Every request/response costs `tr` and every agent hop `tr + ty`,
    /// whatever the payload. Reproduces the closed forms exactly.
    #[default]
    FixedHop,
    /// Latency plus payload over bandwidth from the topology.
    Physical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub timing: TimingMode,
    pub obj_search: ObjSearch,
    /// Maximum relative jitter added to physical transfer times, drawn
    /// uniformly from `[0, jitter)`. Ignored with fixed hop times.
    pub jitter: f64,
    pub seed: u64,
    pub max_events: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            timing: TimingMode::FixedHop,
            obj_search: ObjSearch::Negligible,
            jitter: 0.0,
            seed: 0,
            max_events: DEFAULT_MAX_EVENTS,
        }
    }
}

impl SimConfig {
    pub(crate) fn check(&self, p: &CostParams) -> Result<(), SimError> {
        p.validate()?;
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(SimError::InvalidSetting(format!("jitter {} must be >= 0", self.jitter)));
        }
        Ok(())
    }

    /// Transfer time for one leg under the configured timing mode.
    pub(crate) fn leg<K>(
        &self,
        engine: &mut Engine<K>,
        topology: &Topology,
        from: NodeId,
        to: NodeId,
        bytes: f64,
        fixed: f64,
    ) -> Result<f64, SimError> {
        match self.timing {
            TimingMode::FixedHop => transfer_duration(topology, from, to, bytes, Some(fixed)),
            TimingMode::Physical => {
                let base = transfer_duration(topology, from, to, bytes, None)?;
                if self.jitter > 0.0 {
                    let u: f64 = engine.rng().inner().random();
                    Ok(base * (1.0 + self.jitter * u))
                } else {
                    Ok(base)
                }
            }
        }
    }
}
