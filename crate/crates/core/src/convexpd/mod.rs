//! Continuous-time primal-dual dynamics for convex separable costs,
//! discretised with synchronous steps. The per-arc maximum over sinks is
//! relaxed to an `l^n` norm so that the objective is differentiable.

mod equilibrium;
mod gradient;
mod lyapunov;
mod recover;
mod solve;
mod state;
mod step;

pub use equilibrium::equilibrium_from_flows;
pub use gradient::{grad_U, smoothed_cost, smoothed_rates};
pub use lyapunov::lyapunov_value;
pub use recover::recover_feasible;
pub use solve::{
    elastic_pd_solve, pd_solve, pd_solve_from, reference_equilibrium, PdRecord, PdReport, DIVERGENCE_FACTOR,
};
pub use state::{Demand, Gains, PDParams, PDProblem, PDState, Utility};
pub use step::{divergence, drift, kkt_residual, pd_step, positive_part, Drift};
