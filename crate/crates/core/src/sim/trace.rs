use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::NodeId;

/// One observable step of a run. `bytes` and `cost` are the deltas this
/// step adds to the run totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub node: NodeId,
    pub event: String,
    pub bytes: f64,
    pub cost: f64,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.time, self.node, self.event, self.bytes, self.cost
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    records: Vec<TraceRecord>,
}

impl Trace {
    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_bytes(&self) -> f64 {
        self.records.iter().map(|r| r.bytes).sum()
    }

    pub fn total_cost(&self) -> f64 {
        self.records.iter().map(|r| r.cost).sum()
    }

    /// Tab-separated, one record per line: time, node, event, bytes, cost.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            writeln!(out, "{r}").expect("writing to a String cannot fail");
        }
        out
    }
}
