//! Exact combinatorial kernels: max-flow feasibility, shortest paths,
//! min-cost flow and a dense simplex LP oracle.

mod lp;
mod maxflow;
mod mincost;
mod multicast;
mod paths;

pub use lp::{solve_lp_exact, Constraint, LinearProgram, LpSolution, Sense};
pub use maxflow::{cut_capacity, max_flow, max_flow_arcs, verify_feasible, Feasibility, FlowResult};
pub use mincost::{min_cost_flow, Backend};
pub use multicast::{build_multicast_lp, solve_multicast_lp, MulticastLayout, MulticastSolution};
pub use paths::{dijkstra, shortest_path, Path};
