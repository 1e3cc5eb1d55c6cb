//! Lagrangian dual decomposition for linear costs: per-sink shortest-path
//! or min-cost-flow subproblems, projected subgradient steps on arc prices
//! and recovery of a primal subgraph from averaged flows.

mod projection;
mod schedule;
mod solver;

pub use projection::project_price_simplex;
pub use schedule::{schedule_values, Schedule, ScheduleValues};
pub use solver::{
    dual_subgradient_solve, DualProblem, IterationRecord, PriceSet, SubgradConfig, SubgradReport, Subproblem,
    REPAIR_TOL,
};
