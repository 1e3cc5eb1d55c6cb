use crate::flowcore::max_flow;
use crate::netmodel::{Network, Subgraph};
use crate::{Error, Result};

/// `z' >= z` or `z' <= z` componentwise.
pub fn comparable(z: &Subgraph, other: &Subgraph) -> bool {
    other.dominates(z) || z.dominates(other)
}

/// Every sink of `group` can receive rate `rate` from `source` under `z`.
/// An empty group is always served.
pub fn supports(net: &Network, z: &Subgraph, source: usize, group: &[usize], rate: f64) -> Result<bool> {
    if z.len() != net.arc_count() {
        return Err(Error::InvalidArgument(format!("expected {} rates, got {}", net.arc_count(), z.len())));
    }
    let tol = crate::FEASIBILITY_TOL * rate.max(1.0);
    for &t in group {
        if max_flow(net, z.rates(), source, t)?.value < rate - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A move from `z` to `next` in one time unit is legal iff the two are
/// comparable and `next` supports the new group.
pub fn legal_transition(
    net: &Network,
    source: usize,
    z: &Subgraph,
    next: &Subgraph,
    group: &[usize],
    rate: f64,
) -> Result<bool> {
    Ok(comparable(z, next) && supports(net, next, source, group, rate)?)
}

/// Sequence of subgraphs `z^0 -> z^1 -> ...`, one time unit per move.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionPlan {
    pub steps: Vec<Subgraph>,
}

impl TransitionPlan {
    /// Number of time units the plan takes.
    pub fn moves(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn final_subgraph(&self) -> &Subgraph {
        self.steps.last().expect("plans start at the current subgraph")
    }
}

/// Move from `z` to `target` without interrupting the sinks in `persist`:
/// directly if the two are comparable, otherwise through their componentwise
/// maximum.
pub fn plan_transition(
    net: &Network,
    source: usize,
    z: &Subgraph,
    target: &Subgraph,
    persist: &[usize],
    rate: f64,
) -> Result<TransitionPlan> {
    if z.len() != target.len() {
        return Err(Error::InvalidArgument("subgraphs differ in length".into()));
    }
    if !supports(net, target, source, persist, rate)? {
        return Err(Error::Infeasible("target subgraph does not serve the persisting sinks".into()));
    }
    let steps = if comparable(z, target) {
        vec![z.clone(), target.clone()]
    } else {
        vec![z.clone(), z.max_with(target), target.clone()]
    };
    Ok(TransitionPlan { steps })
}
