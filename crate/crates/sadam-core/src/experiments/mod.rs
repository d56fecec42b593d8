//! Seeded experiments: deterministic runs over (objective, optimizer,
//! schedule, seed), per-iteration metric records, derived stability and
//! chattering studies, and the 2-D probe field scanner.
//!
//! Determinism contract: a `(config, seed)` pair fixes the dataset, the
//! initial point, the batch order, and the probe directions through three
//! independent RNG streams, so rerunning a config reproduces every metric
//! byte-for-byte. Runs across seeds are independent and execute in
//! parallel; results are collected in seed order.

mod chattering;
mod config;
mod field_scan;
mod runner;
mod stability;

pub use chattering::chattering_index;
pub use config::{ExperimentConfig, InitSpec, ObjectiveSpec, OptimizerSpec};
pub use field_scan::{lgi_field_scan, FieldNode, GridSpec};
pub use runner::{
    run_experiment, run_single, run_trajectory, RunRecord, RunRow, RunStatus, RunSummary,
    TrajectoryEnv,
};
pub use stability::{median, stability_study, StabilityConfig, StabilityRow};

/// Salt distinguishing the batch-order substream from dataset synthesis
/// inside the data stream.
pub(crate) const BATCH_ORDER_SALT: u64 = 1;
