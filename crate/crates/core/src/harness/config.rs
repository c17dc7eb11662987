//! Flat `key = value` experiment files.
//!
//! Keys carry a dotted section prefix (`params.tr`, `topology.n`,
//! `sweep.var`, ...). Lines starting with `#` are comments. Unknown or
//! repeated keys are rejected. The full key list is in `docs/config.md`.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agent::{AgentOptions, BagGrowth, ReturnLeg};
use crate::cost_model::{CostParams, ObjSearch};
use crate::remoting::RemotingOptions;
use crate::report::Paradigm;
use crate::sim::{Bandwidth, SimConfig, TimingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVar {
    NServers,
    Alpha,
    CodeSize,
    Tr,
    Ty,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::NServers => "n_servers",
            SweepVar::Alpha => "alpha",
            SweepVar::CodeSize => "code_size",
            SweepVar::Tr => "tr",
            SweepVar::Ty => "ty",
        }
    }

    /// The `params.*` field this variable overrides, if any.
    pub fn param_field(self) -> Option<&'static str> {
        match self {
            SweepVar::NServers => None,
            other => Some(other.name()),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "n_servers" | "n" => SweepVar::NServers,
            "alpha" | "data_size" => SweepVar::Alpha,
            "code_size" => SweepVar::CodeSize,
            "tr" => SweepVar::Tr,
            "ty" => SweepVar::Ty,
            other => {
                return Err(format!(
                    "unknown sweep variable `{other}` (expected n_servers, data_size, alpha, code_size, tr or ty)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// Points `start + i*step` up to `stop` inclusive (with a small slack
    /// for rounding in the division).
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    /// Servers when the sweep does not vary them.
    pub n_servers: u64,
    pub latency: f64,
    pub bandwidth: Bandwidth,
    pub faulty: Vec<usize>,
    pub failure_prob: f64,
    pub resource_at: Option<usize>,
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self {
            n_servers: 8,
            latency: 1.0,
            bandwidth: Bandwidth::Infinite,
            faulty: Vec::new(),
            failure_prob: 0.0,
            resource_at: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub n_rows: Vec<u64>,
    pub size_rows: Vec<f64>,
    /// Server count at which the data-size rows are evaluated.
    pub size_n: u64,
}

impl Default for RegimeSpec {
    fn default() -> Self {
        Self {
            n_rows: (1..=12).collect(),
            size_rows: vec![10.0, 50.0, 100.0, 105.0, 110.0, 150.0, 200.0, 500.0],
            size_n: super::regime::CALIBRATED_SIZE_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub paradigms: Vec<Paradigm>,
    pub sweep: Sweep,
    pub fixed: CostParams,
    pub topology: TopologySpec,
    pub sim: SimConfig,
    pub remoting: RemotingOptions,
    pub agent: AgentOptions,
    pub out_dir: PathBuf,
    pub csv_name: String,
    pub regime: RegimeSpec,
    pub tolerance: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            paradigms: vec![Paradigm::DNR, Paradigm::MA],
            sweep: Sweep {
                var: SweepVar::NServers,
                start: 1.0,
                stop: 10.0,
                step: 1.0,
            },
            fixed: CostParams::default(),
            topology: TopologySpec::default(),
            sim: SimConfig::default(),
            remoting: RemotingOptions::default(),
            agent: AgentOptions::default(),
            out_dir: PathBuf::from("out"),
            csv_name: "sweep.csv".into(),
            regime: RegimeSpec::default(),
            tolerance: 1e-9,
        }
    }
}

impl ExperimentSpec {
    /// Checks cross-field constraints. Called by the parser, and again by
    /// the runners for specs built in code.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |key: &str, msg: String| Err(HarnessError::config(None, key, msg));
        if self.paradigms.is_empty() {
            return err("paradigms", "at least one paradigm is required".into());
        }
        let s = &self.sweep;
        for (key, v) in [("sweep.start", s.start), ("sweep.stop", s.stop), ("sweep.step", s.step)] {
            if !v.is_finite() {
                return err(key, format!("{v} is not a finite number"));
            }
        }
        if s.step <= 0.0 {
            return err("sweep.step", format!("must be > 0 (got {})", s.step));
        }
        if s.stop < s.start {
            return err(
                "sweep.stop",
                format!("range is empty: stop {} < start {}", s.stop, s.start),
            );
        }
        if s.var == SweepVar::NServers {
            for v in s.values() {
                if v < 1.0 || v.fract() != 0.0 || v > crate::cost_model::MAX_N as f64 {
                    return err(
                        "sweep.start",
                        format!("n_servers sweep point {v} is not a positive integer"),
                    );
                }
            }
        } else if s.start < 0.0 {
            return err("sweep.start", format!("{} must be >= 0", s.start));
        }
        if let Err(e) = self.fixed.validate() {
            return err("params", e.to_string());
        }
        if self.topology.n_servers == 0 {
            return err("topology.n", "must be >= 1".into());
        }
        if self.topology.faulty.contains(&0) {
            return err("topology.faulty", "node 0 is the origin and cannot be faulty".into());
        }
        if !(0.0..=1.0).contains(&self.topology.failure_prob) {
            return err(
                "topology.failure_prob",
                format!("{} is outside [0, 1]", self.topology.failure_prob),
            );
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return err("validate.tolerance", format!("{} must be >= 0", self.tolerance));
        }
        if self.regime.size_n == 0 || self.regime.n_rows.contains(&0) {
            return err("regime", "server counts must be >= 1".into());
        }
        if self.csv_name.is_empty() || self.csv_name.contains(['/', '\\']) {
            return err("output.csv", format!("`{}` must be a plain file name", self.csv_name));
        }
        Ok(())
    }
}

fn number(v: &str) -> Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a number, got `{v}`"))
}

fn non_negative(v: &str) -> Result<f64, String> {
    let x = number(v)?;
    if x < 0.0 {
        return Err(format!("must be >= 0 (got {x})"));
    }
    Ok(x)
}

fn integer<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>()
        .map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn boolean(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

fn choice<T: Copy>(v: &str, options: &[(&str, T)]) -> Result<T, String> {
    options
        .iter()
        .find(|(name, _)| *name == v)
        .map(|&(_, t)| t)
        .ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            format!("expected one of {}, got `{v}`", names.join(", "))
        })
}

fn apply(spec: &mut ExperimentSpec, key: &str, v: &str) -> Result<(), String> {
    if let Some(field) = key.strip_prefix("params.") {
        let slot = spec.fixed.field_mut(field).ok_or_else(|| "unknown key".to_string())?;
        *slot = non_negative(v)?;
        return Ok(());
    }
    match key {
        "name" => spec.name = v.to_string(),
        "paradigms" => {
            let mut ps = list(v, |s| s.parse::<Paradigm>())?;
            ps.sort();
            ps.dedup();
            spec.paradigms = ps;
        }
        "sweep.var" => spec.sweep.var = v.parse()?,
        "sweep.start" => spec.sweep.start = number(v)?,
        "sweep.stop" => spec.sweep.stop = number(v)?,
        "sweep.step" => spec.sweep.step = number(v)?,
        "topology.n" => spec.topology.n_servers = integer(v)?,
        "topology.latency" => spec.topology.latency = non_negative(v)?,
        "topology.bandwidth" => {
            spec.topology.bandwidth = if v == "inf" {
                Bandwidth::Infinite
            } else {
                let bw = number(v)?;
                if bw <= 0.0 {
                    return Err(format!("must be > 0 or `inf` (got {bw})"));
                }
                Bandwidth::Finite(bw)
            }
        }
        "topology.faulty" => spec.topology.faulty = list(v, integer)?,
        "topology.failure_prob" => spec.topology.failure_prob = non_negative(v)?,
        "topology.resource_at" => spec.topology.resource_at = Some(integer(v)?),
        "sim.mode" => {
            spec.sim.timing = choice(
                v,
                &[("fixed", TimingMode::FixedHop), ("physical", TimingMode::Physical)],
            )?
        }
        "sim.obj_search" => {
            spec.sim.obj_search = choice(
                v,
                &[
                    ("negligible", ObjSearch::Negligible),
                    ("once", ObjSearch::Once),
                    ("per_node", ObjSearch::PerNode),
                ],
            )?
        }
        "sim.jitter" => spec.sim.jitter = non_negative(v)?,
        "sim.seed" => spec.sim.seed = integer(v)?,
        "sim.max_events" => spec.sim.max_events = integer(v)?,
        "sim.bag_growth" => {
            spec.agent.bag_growth = choice(v, &[("ignored", BagGrowth::Ignored), ("carried", BagGrowth::Carried)])?
        }
        "sim.return_leg" => {
            spec.agent.return_leg = choice(
                v,
                &[("migration", ReturnLeg::Migration), ("message", ReturnLeg::Message)],
            )?
        }
        "sim.result_bytes" => spec.agent.result_bytes = Some(non_negative(v)?),
        "sim.stop_on_found" => {
            let b = boolean(v)?;
            spec.remoting.stop_on_found = b;
            spec.agent.stop_on_found = b;
        }
        "sim.timeout_factor" => spec.remoting.timeout_factor = non_negative(v)?,
        "sim.proxy_bytes" => spec.remoting.proxy_bytes = non_negative(v)?,
        "output.dir" => spec.out_dir = PathBuf::from(v),
        "output.csv" => spec.csv_name = v.to_string(),
        "regime.n_rows" => spec.regime.n_rows = list(v, integer)?,
        "regime.size_rows" => spec.regime.size_rows = list(v, non_negative)?,
        "regime.size_n" => spec.regime.size_n = integer(v)?,
        "validate.tolerance" => spec.tolerance = non_negative(v)?,
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let mut spec = ExperimentSpec::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::config(
                Some(line_no),
                line,
                "expected `key = value`".into(),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::config(Some(line_no), key, "key given twice".into()));
        }
        apply(&mut spec, key, value).map_err(|m| HarnessError::config(Some(line_no), key, m))?;
    }

    let swept_explicitly = seen.contains("sweep.var");
    if let Some(field) = spec.sweep.var.param_field() {
        if seen.contains(&format!("params.{field}")) {
            return Err(HarnessError::config(
                None,
                &format!("params.{field}"),
                format!("`{field}` is swept and cannot also be fixed"),
            ));
        }
    } else if swept_explicitly && seen.contains("topology.n") {
        return Err(HarnessError::config(
            None,
            "topology.n",
            "n_servers is swept and cannot also be fixed".into(),
        ));
    }
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(None, &path.display().to_string(), format!("cannot read config: {e}")))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let spec = parse_config(
            "# comment\n\
             name = demo\n\
             paradigms = MA, DNR\n\
             params.tr = 2.5\n\
             params.code_size = 800\n\
             sweep.var = data_size\n\
             sweep.start = 10\n\
             sweep.stop = 30\n\
             sweep.step = 10\n\
             topology.n = 6\n\
             topology.bandwidth = 1000\n\
             topology.faulty = 2, 4\n\
             sim.mode = physical\n\
             sim.obj_search = per_node\n\
             sim.bag_growth = carried\n\
             sim.seed = 99\n\
             output.csv = demo.csv\n",
        )
        .unwrap();
        assert_eq!(spec.name, "demo");
        assert_eq!(spec.paradigms, vec![Paradigm::DNR, Paradigm::MA]);
        assert_eq!(spec.fixed.tr, 2.5);
        assert_eq!(spec.sweep.var, SweepVar::Alpha);
        assert_eq!(spec.sweep.values(), vec![10.0, 20.0, 30.0]);
        assert_eq!(spec.topology.bandwidth, Bandwidth::Finite(1000.0));
        assert_eq!(spec.topology.faulty, vec![2, 4]);
        assert_eq!(spec.sim.timing, TimingMode::Physical);
        assert_eq!(spec.sim.obj_search, ObjSearch::PerNode);
        assert_eq!(spec.agent.bag_growth, BagGrowth::Carried);
        assert_eq!(spec.sim.seed, 99);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = parse_config("name = x\nparams.gamma = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "config error at line 2: params.gamma: unknown key");
        assert_eq!(e.exit_code(), 2);
        assert!(parse_config("bogus = 1").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_config("params.tr = -1").is_err());
        assert!(parse_config("params.tr = abc").is_err());
        assert!(parse_config("sweep.step = 0").is_err());
        assert!(parse_config("sweep.start = 5\nsweep.stop = 1").is_err());
        assert!(parse_config("sweep.start = 1.5").is_err());
        assert!(parse_config("topology.faulty = 0").is_err());
        assert!(parse_config("topology.failure_prob = 2").is_err());
        assert!(parse_config("sim.mode = quantum").is_err());
        assert!(parse_config("name = a\nname = b").is_err());
        assert!(parse_config("just words").is_err());
        assert!(parse_config("output.csv = ../x.csv").is_err());
    }

    #[test]
    fn swept_field_cannot_be_fixed() {
        let e = parse_config("sweep.var = tr\nparams.tr = 1").unwrap_err();
        assert!(e.to_string().contains("params.tr"), "{e}");
        assert!(parse_config("sweep.var = n_servers\ntopology.n = 4").is_err());
        assert!(parse_config("topology.n = 4").is_ok());
        assert!(parse_config("sweep.var = tr\ntopology.n = 4").is_ok());
    }

    #[test]
    fn sweep_values_are_exact_multiples() {
        let s = Sweep {
            var: SweepVar::Tr,
            start: 0.0,
            stop: 1.0,
            step: 0.1,
        };
        let v = s.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[3], 0.30000000000000004);
    }
}
