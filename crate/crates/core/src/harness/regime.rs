//! Winner tables over server counts and data sizes.
//!
//! Calibration (derivation in `docs/calibration.md`): the time metrics are
//! both proportional to `n`, so the time winner never changes with `n`.
//! A table that flips from DNR to MA as servers are added therefore needs
//! a time tie (`ty == tr`) and lets the invocation cost decide.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::cost_model::{classify_regime, CostParams, Regime};

/// Server count at which the data-size rows are evaluated.
pub const CALIBRATED_SIZE_N: u64 = 5;

/// `tr = ty = 1`, `alpha = beta = 100`, `psi = 10`, `sigma = 1`,
/// `code_size = 500`, `t_proxy = 50`. Cost crossover at six servers; at
/// five servers the alpha crossover sits at 101.25.
pub fn calibrated_params() -> CostParams {
    CostParams::default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Servers,
    DataSize,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Servers => "servers",
            Axis::DataSize => "data_size",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub axis: Axis,
    pub value: f64,
    pub n: u64,
    pub alpha: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeTable {
    pub rows: Vec<RegimeRow>,
}

impl RegimeTable {
    pub fn servers(&self) -> impl Iterator<Item = &RegimeRow> {
        self.rows.iter().filter(|r| r.axis == Axis::Servers)
    }

    pub fn data_sizes(&self) -> impl Iterator<Item = &RegimeRow> {
        self.rows.iter().filter(|r| r.axis == Axis::DataSize)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("axis,value,n,alpha,time_winner,cost_winner,overall\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.axis, r.value, r.n, r.alpha, r.regime.time_winner, r.regime.cost_winner, r.regime.overall
            ));
        }
        s
    }
}

impl fmt::Display for RegimeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>10} {:>6} {:>10}  {:<6} {:<6} overall",
            "axis", "value", "n", "alpha", "time", "cost"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:>10} {:>6} {:>10}  {:<6} {:<6} {}",
                r.axis.to_string(),
                r.value,
                r.n,
                r.alpha,
                r.regime.time_winner.to_string(),
                r.regime.cost_winner.to_string(),
                r.regime.overall
            )?;
        }
        Ok(())
    }
}

/// One row per server count in `n_rows` (parameters as given) and one per
/// data size in `size_rows`, where a size sets both `alpha` and `beta` and
/// is evaluated at `size_n` servers.
pub fn regime_table(
    params: &CostParams,
    n_rows: &[u64],
    size_rows: &[f64],
    size_n: u64,
) -> Result<RegimeTable, HarnessError> {
    params.validate()?;
    let mut rows = Vec::with_capacity(n_rows.len() + size_rows.len());
    for &n in n_rows {
        rows.push(RegimeRow {
            axis: Axis::Servers,
            value: n as f64,
            n,
            alpha: params.alpha,
            regime: classify_regime(params, n)?,
        });
    }
    for &size in size_rows {
        let p = CostParams {
            alpha: size,
            beta: size,
            ..*params
        };
        p.validate()?;
        rows.push(RegimeRow {
            axis: Axis::DataSize,
            value: size,
            n: size_n,
            alpha: size,
            regime: classify_regime(&p, size_n)?,
        });
    }
    Ok(RegimeTable { rows })
}
