//! Utilization and message-complexity sweeps over the graph families, plus
//! the distributional checks used by `dist-check`.

mod checks;
mod config;
mod report;
mod sweep;

use thiserror::Error;

use crate::graph::GraphError;
use crate::stats::StatsError;
use crate::walk::WalkError;

pub use checks::{oracle_check, stationary_check, DistCheck};
pub use config::parse_config;
pub use report::{emit_report, write_csv, write_svg, Metric};
pub use sweep::{
    length_grid, run_cell, run_kappa_sweep, run_message_sweep, run_sweep, ExperimentRecord,
    LengthSetting, ReplicaOutcome, SweepSpec, SweptParam,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },
    #[error("no records to report")]
    EmptyRecords,
}
