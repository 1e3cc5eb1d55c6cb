//! Experiment plumbing: TOML configs, seeded runners that write CSV
//! results, summaries and traces, and table comparison with bootstrap
//! intervals.

mod compare;
mod config;
mod run;

pub use compare::{compare, CompareOptions, Comparison, ReductionRow};
pub use config::{DynamicSettings, ExperimentConfig, InstanceConfig, Scenario, SolverConfig};
pub use run::{instance_seed, run, RunSummary};
