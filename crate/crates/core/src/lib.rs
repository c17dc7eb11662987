//! Remote invocation versus mobile agents: a closed-form time and cost
//! model, a deterministic discrete-event simulator for both interaction
//! paradigms, and an experiment harness that checks one against the other.

pub mod agent;
pub mod cost_model;
pub mod harness;
pub mod remoting;
pub mod report;
pub mod sim;

pub use agent::{run_agent, AgentOptions, BagGrowth, ReturnLeg};
pub use cost_model::{CostParams, CrossoverKind, CrossoverResult, ObjSearch, Overall, Regime, Winner};
pub use remoting::{run_remoting, RemotingOptions};
pub use report::{Paradigm, RunReport};
pub use sim::{SimConfig, SimError, TimingMode, Topology};
