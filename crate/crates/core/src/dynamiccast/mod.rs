//! Dynamic multicast: a birth-death membership process, subgraph moves
//! that never interrupt persisting sinks, and Monte Carlo evaluation of
//! stationary policies.

mod membership;
mod policy;
mod transition;

pub use membership::{MembershipProcess, MembershipStep};
pub use policy::{DynamicConfig, DynamicMulticast, Phase, Policy, PolicyEstimate, StepRecord, Trajectory};
pub use transition::{comparable, legal_transition, plan_transition, supports, TransitionPlan};
