use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sim::{NodeId, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Paradigm {
    /// Sequential remote invocation through a proxy.
    DNR,
    /// Mobile agent following an itinerary.
    MA,
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Paradigm::DNR => "DNR",
            Paradigm::MA => "MA",
        })
    }
}

impl FromStr for Paradigm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DNR" => Ok(Paradigm::DNR),
            "MA" => Ok(Paradigm::MA),
            other => Err(format!("unknown paradigm `{other}` (expected DNR or MA)")),
        }
    }
}

/// One node's contribution to the agent's bag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub node: NodeId,
    pub bytes: f64,
}

/// Measured totals of a single simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub paradigm: Paradigm,
    /// Servers interrogated (DNR) or itinerary length including the origin (MA).
    pub n: u64,
    pub comm_time: f64,
    pub invocation_cost: f64,
    pub messages: u64,
    pub bytes_on_wire: f64,
    pub remote_invocations: u64,
    pub local_invocations: u64,
    /// Agent migrations between itinerary nodes; the return leg is not a hop.
    pub hops: u64,
    pub visited: Vec<NodeId>,
    pub skipped: Vec<NodeId>,
    pub found: bool,
    pub timeouts: u64,
    /// Result records that reached the client.
    pub results: u64,
    pub bag: Vec<ResultRecord>,
    pub trace: Trace,
}

impl RunReport {
    pub(crate) fn empty(paradigm: Paradigm, n: u64) -> Self {
        Self {
            paradigm,
            n,
            comm_time: 0.0,
            invocation_cost: 0.0,
            messages: 0,
            bytes_on_wire: 0.0,
            remote_invocations: 0,
            local_invocations: 0,
            hops: 0,
            visited: Vec::new(),
            skipped: Vec::new(),
            found: false,
            timeouts: 0,
            results: 0,
            bag: Vec::new(),
            trace: Trace::default(),
        }
    }

    pub fn no_result(&self) -> bool {
        self.results == 0
    }
}

fn join(ids: &[NodeId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "paradigm            {}", self.paradigm)?;
        writeln!(f, "n                   {}", self.n)?;
        writeln!(f, "comm_time           {}", self.comm_time)?;
        writeln!(f, "invocation_cost     {}", self.invocation_cost)?;
        writeln!(f, "messages            {}", self.messages)?;
        writeln!(f, "bytes_on_wire       {}", self.bytes_on_wire)?;
        writeln!(f, "remote_invocations  {}", self.remote_invocations)?;
        writeln!(f, "local_invocations   {}", self.local_invocations)?;
        writeln!(f, "hops                {}", self.hops)?;
        writeln!(f, "timeouts            {}", self.timeouts)?;
        writeln!(f, "results             {}", self.results)?;
        writeln!(f, "found               {}", self.found)?;
        writeln!(f, "visited             [{}]", join(&self.visited))?;
        write!(f, "skipped             [{}]", join(&self.skipped))
    }
}
