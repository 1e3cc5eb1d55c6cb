use super::gradient::grad_U;
use super::state::{Demand, PDProblem, PDState};
use crate::netmodel::FlowSet;
use crate::{Error, Result};

/// Flows above this are treated as strictly positive.
const SUPPORT_TOL: f64 = 1e-9;

/// Complete optimal flows `x^` to an equilibrium `(x^, p^, lambda^)` of the
/// fixed-rate dynamics. Potentials solve the difference constraints
/// `p_i - p_j = dU/dx` on arcs carrying flow and `p_i - p_j >= dU/dx`
/// elsewhere; each sink's potentials are then shifted to sum to
/// `p_sums[k]`, the quantity the dynamics conserve. Fails when `x^` is not
/// optimal, i.e. the constraints are inconsistent.
pub fn equilibrium_from_flows(problem: &PDProblem<'_>, x: &FlowSet, p_sums: &[f64], tol: f64) -> Result<PDState> {
    if !matches!(problem.demand, Demand::Fixed(_)) {
        return Err(Error::InvalidArgument("equilibrium completion needs a fixed rate".into()));
    }
    let net = problem.net;
    let n = net.node_count();
    let grad = grad_U(x, problem.costs);
    let mut p = Vec::with_capacity(problem.sinks.len());
    let mut lambda = Vec::with_capacity(problem.sinks.len());
    for k in 0..problem.sinks.len() {
        // Edge (u -> v, w) encodes p_v <= p_u + w.
        let mut edges = Vec::new();
        for (e, a) in net.arcs().iter().enumerate() {
            edges.push((a.tail, a.head, -grad[k][e]));
            if x.flows[k][e] > SUPPORT_TOL {
                edges.push((a.head, a.tail, grad[k][e] + tol));
            }
        }
        let mut pk = vec![0.0f64; n];
        let mut settled = false;
        for _ in 0..=n {
            let mut changed = false;
            for &(u, v, w) in &edges {
                if pk[u] + w < pk[v] - 1e-15 {
                    pk[v] = pk[u] + w;
                    changed = true;
                }
            }
            if !changed {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::Numerical("flows are not optimal: potential constraints are inconsistent".into()));
        }
        let shift = (p_sums[k] - pk.iter().sum::<f64>()) / n as f64;
        pk.iter_mut().for_each(|v| *v += shift);
        let lk: Vec<f64> = net
            .arcs()
            .iter()
            .enumerate()
            .map(|(e, a)| {
                if x.flows[k][e] > SUPPORT_TOL {
                    0.0
                } else {
                    (pk[a.tail] - pk[a.head] - grad[k][e]).max(0.0)
                }
            })
            .collect();
        p.push(pk);
        lambda.push(lk);
    }
    Ok(PDState { x: x.clone(), p, lambda, rate: None, lambda_rate: 0.0 })
}
