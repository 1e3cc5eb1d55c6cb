use crate::flowcore::{max_flow, min_cost_flow, Backend};
use crate::netmodel::{MulticastRequest, Network, Subgraph};
use crate::{Error, Result};

/// Smallest common max-flow treated as nonzero.
const FLOW_FLOOR: f64 = 1e-12;

/// A feasible subgraph from arbitrary nonnegative rates `z'`: route
/// `g = min(F, R)` to every sink inside `z'` (cheapest routes by arc cost),
/// take the per-arc maximum and scale by `R / g`.
pub fn recover_feasible(net: &Network, z: &Subgraph, req: &MulticastRequest) -> Result<Subgraph> {
    if z.len() != net.arc_count() {
        return Err(Error::InvalidArgument(format!("expected {} rates, got {}", net.arc_count(), z.len())));
    }
    let low = req
        .sinks
        .iter()
        .map(|&t| max_flow(net, z.rates(), req.source, t).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(low > FLOW_FLOOR) {
        return Err(Error::Unrecoverable);
    }
    let g = low.min(req.rate);
    let costs = net.costs();
    let mut out = vec![0.0f64; net.arc_count()];
    for &t in &req.sinks {
        let f = min_cost_flow(net, &costs, z.rates(), req.source, t, g, Backend::Centralized, 0)?;
        for (o, v) in out.iter_mut().zip(&f.flow) {
            *o = o.max(*v);
        }
    }
    let scale = req.rate / g;
    Ok(Subgraph::from_clamped(out.into_iter().map(|v| v * scale).collect()))
}
