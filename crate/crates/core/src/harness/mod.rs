//! Experiment runner: sweeps, simulation-vs-model validation, regime tables.

mod config;
pub mod regime;
mod sweep;
mod validate;

use thiserror::Error;

pub use config::{load_config, parse_config, ExperimentSpec, RegimeSpec, Sweep, SweepVar, TopologySpec};
pub use regime::{calibrated_params, regime_table, Axis, RegimeRow, RegimeTable, CALIBRATED_SIZE_N};
pub use sweep::{
    collect_reports, gnuplot_script, params_at, predict, read_csv, run_point, run_sweep, write_csv, CsvRow,
    SweepOutput, SweepPoint,
};
pub use validate::{validate, validate_against, Metric, ValidationPoint, ValidationReport};

use crate::cost_model::ModelError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error{}: {key}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },
    #[error("validation refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn config(line: Option<usize>, key: &str, message: String) -> Self {
        HarnessError::Config {
            line,
            key: key.to_string(),
            message,
        }
    }

    /// 2 for configuration problems, 3 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config { .. } | HarnessError::Refused(_) => 2,
            _ => 3,
        }
    }
}
