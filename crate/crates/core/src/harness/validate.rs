use std::fmt;

use serde::{Deserialize, Serialize};

use super::sweep::{collect_reports, params_at};
use super::{ExperimentSpec, HarnessError};
use crate::agent::ReturnLeg;
use crate::cost_model::{self, CostParams};
use crate::report::Paradigm;
use crate::sim::TimingMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    CommTime,
    InvocationCost,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::CommTime => "comm_time",
            Metric::InvocationCost => "invocation_cost",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationPoint {
    pub paradigm: Paradigm,
    pub metric: Metric,
    pub sweep_value: f64,
    pub n: u64,
    pub simulated: f64,
    pub analytical: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub points: Vec<ValidationPoint>,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &ValidationPoint> {
        self.points
            .iter()
            .filter(move |p| p.rel_error > self.tolerance || p.rel_error.is_nan())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} points, max relative error {:e}, tolerance {:e}: {}",
            self.points.len(),
            self.max_rel_error,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        for p in self.failures() {
            writeln!(
                f,
                "  {} {} at {} (n={}): simulated {} vs model {} (rel {:e})",
                p.paradigm, p.metric, p.sweep_value, p.n, p.simulated, p.analytical, p.rel_error
            )?;
        }
        Ok(())
    }
}

fn relative(simulated: f64, analytical: f64) -> f64 {
    let abs = (simulated - analytical).abs();
    if abs == 0.0 {
        0.0
    } else if analytical == 0.0 {
        f64::INFINITY
    } else {
        abs / analytical.abs()
    }
}

/// The closed-form side of a comparison; `ReturnLeg::Message` swaps the
/// final `tr + ty` for a bare `tr`.
fn model(spec: &ExperimentSpec, paradigm: Paradigm, p: &CostParams, n: u64) -> Result<(f64, f64), HarnessError> {
    let search = spec.sim.obj_search;
    Ok(match paradigm {
        Paradigm::DNR => (
            cost_model::dnr_comm_time(p, n, search)?,
            cost_model::dnr_invocation_cost(p, n, true)?,
        ),
        Paradigm::MA => {
            let travel = match spec.agent.return_leg {
                ReturnLeg::Migration => cost_model::ma_comm_time(p, n, true)?,
                ReturnLeg::Message => cost_model::ma_comm_time(p, n, false)? + p.tr,
            };
            (travel + search.total(p.t_obj, n), cost_model::ma_invocation_cost(p, n)?)
        }
    })
}

fn refuse_unless_comparable(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    if spec.sim.timing != TimingMode::FixedHop {
        return Err(HarnessError::Refused(
            "the closed-form model only covers fixed per-hop times; set sim.mode = fixed".into(),
        ));
    }
    let t = &spec.topology;
    if !t.faulty.is_empty() || t.failure_prob > 0.0 {
        return Err(HarnessError::Refused(
            "the closed-form model assumes every node is up; clear topology.faulty and topology.failure_prob".into(),
        ));
    }
    if spec.remoting.stop_on_found || spec.agent.stop_on_found {
        return Err(HarnessError::Refused(
            "the closed-form model visits every node; set sim.stop_on_found = false".into(),
        ));
    }
    Ok(())
}

/// Compares every simulated point of the sweep with the model evaluated at
/// `analytical_fixed` (with the swept variable applied on both sides).
pub fn validate_against(
    spec: &ExperimentSpec,
    analytical_fixed: &CostParams,
    tolerance: f64,
) -> Result<ValidationReport, HarnessError> {
    refuse_unless_comparable(spec)?;
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(HarnessError::config(
            None,
            "tolerance",
            format!("{tolerance} must be >= 0"),
        ));
    }
    let model_spec = ExperimentSpec {
        fixed: *analytical_fixed,
        ..spec.clone()
    };
    let mut points = Vec::new();
    for sp in collect_reports(spec, false)? {
        let (p, n) = params_at(&model_spec, sp.sweep_value);
        let (time, cost) = model(spec, sp.paradigm, &p, n)?;
        for (metric, simulated, analytical) in [
            (Metric::CommTime, sp.report.comm_time, time),
            (Metric::InvocationCost, sp.report.invocation_cost, cost),
        ] {
            points.push(ValidationPoint {
                paradigm: sp.paradigm,
                metric,
                sweep_value: sp.sweep_value,
                n,
                simulated,
                analytical,
                abs_error: (simulated - analytical).abs(),
                rel_error: relative(simulated, analytical),
            });
        }
    }
    let max_rel_error = points.iter().map(|p| p.rel_error).fold(0.0, f64::max);
    Ok(ValidationReport {
        passed: max_rel_error <= tolerance,
        points,
        max_rel_error,
        tolerance,
    })
}

pub fn validate(spec: &ExperimentSpec, tolerance: f64) -> Result<ValidationReport, HarnessError> {
    validate_against(spec, &spec.fixed, tolerance)
}
