//! Routed comparators: a directed Steiner tree approximation for wireline
//! networks, the multicast incremental power heuristic for wireless ones,
//! and five reliable unicast schemes over lossy links.

mod mip;
mod steiner;
mod unicast;

pub use mip::{mip_heuristic, PowerAssignment};
pub use steiner::{dst_approx, RoutedTree};
pub use unicast::{path_expectation, unicast_cost, AckModel, UnicastConfig, UnicastEstimate, UnicastStrategy};

/// Recursive greedy level used when none is given.
pub const DEFAULT_DST_LEVEL: usize = 2;
