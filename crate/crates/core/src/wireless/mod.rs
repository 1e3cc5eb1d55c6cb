//! Wireless formulations over broadcast hyperarcs: lossy reception, the
//! lossless problem, the nested power-level reduction and the mappings
//! between the latter two.

mod formulations;
mod mapping;
mod reception;

pub use formulations::{
    build_lp_lossless, build_lp_lossy, build_lp_nested, hyper_max_flows, lossless_violation, nested_violation,
    solve_lossless, solve_lossy, solve_nested, solve_with_fixed_rates, verify_hyper_feasible, HyperLayout,
    HyperSolution, NestedLayout, NestedSolution, CONSTRAINT_BOUND,
};
pub use mapping::{expand_from_hat, nested_rates, reduce_to_hat, wireless_dual_costs};
pub use reception::{reception_prob_b, reception_prob_enumerated};
