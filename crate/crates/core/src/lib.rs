//! Minimum-cost subgraph selection for multicast over coded packet networks.
//!
//! With network coding, a rate-`R` multicast from `s` to a sink set `T` is
//! feasible on a subgraph `z` exactly when every sink can receive an
//! `s`-to-`t` flow of value `R` within the arc rates `z`. Cost minimisation
//! therefore becomes a flow problem rather than a Steiner tree problem. The
//! crate provides:
//!
//! * [`netmodel`]: wireline networks, wireless hypernetworks, requests,
//!   subgraphs and flows, random geometric instances, JSON/CSV I/O.
//! * [`flowcore`]: max-flow feasibility, shortest paths, min-cost flow
//!   (successive shortest paths and a seeded ε-relaxation), and a dense
//!   simplex LP solver used as the exact oracle.
//! * [`subgrad`]: the decentralised Lagrangian dual solver with simplex
//!   projection and primal recovery.
//! * [`convexpd`]: the primal-dual solver for convex separable costs,
//!   including elastic rates and a Lyapunov monitor.
//! * [`wireless`]: lossy, lossless and nested-power formulations and the
//!   mappings between the latter two.
//! * [`baselines`]: routed comparators (DST approximation, MIP, unicast
//!   reliability strategies).
//! * [`dynamiccast`]: dynamic membership, legal subgraph transitions and
//!   policy simulation.
//! * [`harness`]: experiment configuration, runners and table comparison.

pub mod baselines;
pub mod convexpd;
pub mod dynamiccast;
pub mod error;
pub mod flowcore;
pub mod harness;
pub mod netmodel;
pub mod subgrad;
pub mod wireless;

pub use error::{Error, Result};

/// Relative tolerance used by feasibility and conservation checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;
