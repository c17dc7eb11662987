use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SimError, SimRng};
use crate::cost_model::CostParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeStatus {
    Up,
    Faulty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub status: NodeStatus,
    /// Per-node object search time.
    pub search_time: f64,
    /// Per-node cost of one local invocation.
    pub local_invocation_cost: f64,
    pub holds_resource: bool,
}

impl NodeSpec {
    pub fn up(id: usize, search_time: f64, local_invocation_cost: f64) -> Self {
        Self {
            id: NodeId(id),
            status: NodeStatus::Up,
            search_time,
            local_invocation_cost,
            holds_resource: false,
        }
    }

    pub fn is_up(&self) -> bool {
        self.status == NodeStatus::Up
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// Bytes per time unit.
    Finite(f64),
    Infinite,
}

impl Bandwidth {
    fn time_for(self, bytes: f64) -> f64 {
        match self {
            Bandwidth::Finite(bw) => bytes / bw,
            Bandwidth::Infinite => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Links {
    /// Identical latency and bandwidth between every distinct pair; a node
    /// reaches itself instantly.
    Uniform { latency: f64, bandwidth: Bandwidth },
    /// Row = source, column = destination.
    Matrix {
        latency: Vec<Vec<f64>>,
        bandwidth: Vec<Vec<Bandwidth>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    nodes: Vec<NodeSpec>,
    links: Links,
    origin: NodeId,
}

impl Topology {
    /// Node ids must be exactly `0..nodes.len()` in order.
    pub fn new(nodes: Vec<NodeSpec>, links: Links, origin: NodeId) -> Result<Self, SimError> {
        let bad = |msg: String| Err(SimError::InvalidTopology(msg));
        if nodes.is_empty() {
            return bad("topology has no nodes".into());
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != NodeId(i) {
                return bad(format!(
                    "node at position {i} has id {}; ids must be 0..{}",
                    node.id.0,
                    nodes.len()
                ));
            }
            if !(node.search_time.is_finite() && node.search_time >= 0.0) {
                return bad(format!("node {} has invalid search_time {}", i, node.search_time));
            }
            if !(node.local_invocation_cost.is_finite() && node.local_invocation_cost >= 0.0) {
                return bad(format!(
                    "node {} has invalid local_invocation_cost {}",
                    i, node.local_invocation_cost
                ));
            }
        }
        if nodes.iter().filter(|n| n.holds_resource).count() > 1 {
            return bad("more than one node holds the resource".into());
        }
        let Some(o) = nodes.get(origin.0) else {
            return Err(SimError::OriginMissing(origin));
        };
        if !o.is_up() {
            return bad(format!("origin {origin} is faulty"));
        }
        let valid_bw = |b: &Bandwidth| match *b {
            Bandwidth::Finite(bw) => bw.is_finite() && bw > 0.0,
            Bandwidth::Infinite => true,
        };
        match &links {
            Links::Uniform { latency, bandwidth } => {
                if !(latency.is_finite() && *latency >= 0.0) {
                    return bad(format!("latency {latency} must be finite and non-negative"));
                }
                if !valid_bw(bandwidth) {
                    return bad(format!("bandwidth {bandwidth:?} must be positive"));
                }
            }
            Links::Matrix { latency, bandwidth } => {
                let n = nodes.len();
                if latency.len() != n || latency.iter().any(|r| r.len() != n) {
                    return bad(format!("latency matrix must be {n}x{n}"));
                }
                if bandwidth.len() != n || bandwidth.iter().any(|r| r.len() != n) {
                    return bad(format!("bandwidth matrix must be {n}x{n}"));
                }
                if latency.iter().flatten().any(|l| !(l.is_finite() && *l >= 0.0)) {
                    return bad("latency entries must be finite and non-negative".into());
                }
                if !bandwidth.iter().flatten().all(valid_bw) {
                    return bad("bandwidth entries must be positive".into());
                }
            }
        }
        Ok(Self { nodes, links, origin })
    }

    /// Origin `n0` plus servers `n1..=n_servers`, all up, equal links.
    /// Per-node search time and local cost are taken from `p`.
    pub fn uniform(n_servers: usize, p: &CostParams, latency: f64, bandwidth: Bandwidth) -> Result<Self, SimError> {
        let nodes = (0..=n_servers).map(|i| NodeSpec::up(i, p.t_obj, p.sigma)).collect();
        Self::new(nodes, Links::Uniform { latency, bandwidth }, NodeId(0))
    }

    pub fn origin(&self) -> NodeId {
        self.origin
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Servers in id order, origin excluded.
    pub fn servers(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .map(|n| n.id)
            .filter(|&id| id != self.origin)
            .collect()
    }

    pub fn node(&self, id: NodeId) -> Result<&NodeSpec, SimError> {
        self.nodes.get(id.0).ok_or(SimError::UnknownNode(id))
    }

    pub fn set_status(&mut self, id: NodeId, status: NodeStatus) -> Result<(), SimError> {
        if id == self.origin && status == NodeStatus::Faulty {
            return Err(SimError::InvalidTopology(format!("origin {id} cannot be faulty")));
        }
        self.nodes.get_mut(id.0).ok_or(SimError::UnknownNode(id))?.status = status;
        Ok(())
    }

    /// Moves the resource to `id` (or clears it).
    pub fn set_resource(&mut self, id: Option<NodeId>) -> Result<(), SimError> {
        if let Some(id) = id {
            self.node(id)?;
        }
        for node in &mut self.nodes {
            node.holds_resource = Some(node.id) == id;
        }
        Ok(())
    }

    /// Marks every non-origin node faulty with probability `prob`.
    pub fn sample_failures(&mut self, rng: &mut SimRng, prob: f64) {
        let origin = self.origin;
        for node in self.nodes.iter_mut().filter(|n| n.id != origin) {
            if rng.inner().random_bool(prob.clamp(0.0, 1.0)) {
                node.status = NodeStatus::Faulty;
            }
        }
    }

    pub fn latency(&self, from: NodeId, to: NodeId) -> Result<f64, SimError> {
        self.node(from)?;
        self.node(to)?;
        Ok(match &self.links {
            Links::Uniform { .. } if from == to => 0.0,
            Links::Uniform { latency, .. } => *latency,
            Links::Matrix { latency, .. } => latency[from.0][to.0],
        })
    }

    pub fn bandwidth(&self, from: NodeId, to: NodeId) -> Result<Bandwidth, SimError> {
        self.node(from)?;
        self.node(to)?;
        Ok(match &self.links {
            Links::Uniform { .. } if from == to => Bandwidth::Infinite,
            Links::Uniform { bandwidth, .. } => *bandwidth,
            Links::Matrix { bandwidth, .. } => bandwidth[from.0][to.0],
        })
    }
}

/// Time to move `payload_bytes` from `from` to `to`.
///
/// With a fixed per-hop time the link model is bypassed and the override is
/// returned as is; otherwise latency plus serialization time.
pub fn transfer_duration(
    topology: &Topology,
    from: NodeId,
    to: NodeId,
    payload_bytes: f64,
    fixed_time_override: Option<f64>,
) -> Result<f64, SimError> {
    let latency = topology.latency(from, to)?;
    let bandwidth = topology.bandwidth(from, to)?;
    Ok(match fixed_time_override {
        Some(t) => t,
        None => latency + bandwidth.time_for(payload_bytes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(latency: f64, bw: Bandwidth) -> Topology {
        Topology::uniform(3, &CostParams::zero(), latency, bw).unwrap()
    }

    #[test]
    fn override_wins() {
        let t = topo(2.0, Bandwidth::Finite(100.0));
        assert_eq!(
            transfer_duration(&t, NodeId(0), NodeId(1), 1e9, Some(1.0)).unwrap(),
            1.0
        );
    }

    #[test]
    fn latency_plus_serialization() {
        let t = topo(2.0, Bandwidth::Finite(100.0));
        assert_eq!(transfer_duration(&t, NodeId(0), NodeId(1), 300.0, None).unwrap(), 5.0);
        assert_eq!(transfer_duration(&t, NodeId(0), NodeId(1), 0.0, None).unwrap(), 2.0);
        assert_eq!(transfer_duration(&t, NodeId(2), NodeId(2), 300.0, None).unwrap(), 0.0);
        let inf = topo(2.0, Bandwidth::Infinite);
        assert_eq!(transfer_duration(&inf, NodeId(0), NodeId(1), 1e12, None).unwrap(), 2.0);
    }

    #[test]
    fn unknown_node() {
        let t = topo(1.0, Bandwidth::Infinite);
        assert_eq!(
            transfer_duration(&t, NodeId(0), NodeId(9), 0.0, Some(1.0)),
            Err(SimError::UnknownNode(NodeId(9)))
        );
    }

    #[test]
    fn rejects_bad_topologies() {
        let p = CostParams::zero();
        assert!(Topology::uniform(2, &p, -1.0, Bandwidth::Infinite).is_err());
        assert!(Topology::uniform(2, &p, 1.0, Bandwidth::Finite(0.0)).is_err());
        assert!(Topology::new(
            vec![],
            Links::Uniform {
                latency: 1.0,
                bandwidth: Bandwidth::Infinite
            },
            NodeId(0)
        )
        .is_err());

        let links = Links::Uniform {
            latency: 1.0,
            bandwidth: Bandwidth::Infinite,
        };
        let dup = vec![NodeSpec::up(0, 0.0, 0.0), NodeSpec::up(0, 0.0, 0.0)];
        assert!(Topology::new(dup, links.clone(), NodeId(0)).is_err());

        let nodes = vec![NodeSpec::up(0, 0.0, 0.0)];
        assert_eq!(
            Topology::new(nodes, links.clone(), NodeId(3)),
            Err(SimError::OriginMissing(NodeId(3)))
        );

        let mut two = vec![
            NodeSpec::up(0, 0.0, 0.0),
            NodeSpec::up(1, 0.0, 0.0),
            NodeSpec::up(2, 0.0, 0.0),
        ];
        two[1].holds_resource = true;
        two[2].holds_resource = true;
        assert!(Topology::new(two, links, NodeId(0)).is_err());
    }

    #[test]
    fn matrix_links() {
        let nodes = vec![NodeSpec::up(0, 0.0, 0.0), NodeSpec::up(1, 0.0, 0.0)];
        let links = Links::Matrix {
            latency: vec![vec![0.0, 3.0], vec![4.0, 0.0]],
            bandwidth: vec![
                vec![Bandwidth::Infinite, Bandwidth::Finite(10.0)],
                vec![Bandwidth::Finite(20.0), Bandwidth::Infinite],
            ],
        };
        let t = Topology::new(nodes, links, NodeId(0)).unwrap();
        assert_eq!(transfer_duration(&t, NodeId(0), NodeId(1), 100.0, None).unwrap(), 13.0);
        assert_eq!(transfer_duration(&t, NodeId(1), NodeId(0), 100.0, None).unwrap(), 9.0);
    }

    #[test]
    fn origin_cannot_fail() {
        let mut t = topo(1.0, Bandwidth::Infinite);
        assert!(t.set_status(NodeId(0), NodeStatus::Faulty).is_err());
        t.set_status(NodeId(2), NodeStatus::Faulty).unwrap();
        assert_eq!(t.node(NodeId(2)).unwrap().status, NodeStatus::Faulty);

        let mut rng = SimRng::seeded(7);
        let mut all = topo(1.0, Bandwidth::Infinite);
        all.sample_failures(&mut rng, 1.0);
        assert!(all.node(NodeId(0)).unwrap().is_up());
        assert!(all.servers().iter().all(|&s| !all.node(s).unwrap().is_up()));
    }
}
