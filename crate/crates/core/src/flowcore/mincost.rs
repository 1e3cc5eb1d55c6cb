use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maxflow::{max_flow, FlowResult, Residual};
use crate::netmodel::Network;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Successive shortest paths with node potentials.
    #[default]
    Centralized,
    /// Cost-scaling ε-relaxation with node updates in seeded random order.
    AsyncRelaxation,
}

/// Minimum-cost `s`-`t` flow of value `demand`. Infinite capacities are
/// treated as `demand`.
#[allow(clippy::too_many_arguments)]
pub fn min_cost_flow(
    net: &Network,
    weights: &[f64],
    caps: &[f64],
    s: usize,
    t: usize,
    demand: f64,
    backend: Backend,
    seed: u64,
) -> Result<FlowResult> {
    let n = net.node_count();
    if s >= n || t >= n {
        return Err(Error::UnknownNode(s.max(t).to_string()));
    }
    if weights.len() != net.arc_count() || caps.len() != net.arc_count() {
        return Err(Error::InvalidArgument("one weight and capacity per arc required".into()));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    if !(demand >= 0.0) || !demand.is_finite() {
        return Err(Error::InvalidArgument(format!("demand {demand} must be finite and nonnegative")));
    }
    let caps: Vec<f64> = caps.iter().map(|&c| if c.is_finite() { c.max(0.0) } else { demand }).collect();
    if demand > 0.0 {
        let mf = max_flow(net, &caps, s, t)?.value;
        if mf < demand * (1.0 - 1e-12) {
            return Err(Error::InfeasibleDemand { demand, max_flow: mf });
        }
    }
    let res = Residual::new(
        n,
        net.arcs().iter().zip(&caps).zip(weights).map(|((a, &c), &w)| (a.tail, a.head, c, w)),
    );
    let (res, potentials) = match backend {
        Backend::Centralized => successive_shortest_paths(res, s, t, demand)?,
        Backend::AsyncRelaxation => epsilon_relaxation(res, s, t, demand, seed)?,
    };
    let flow: Vec<f64> = (0..net.arc_count()).map(|e| res.flow(e)).collect();
    let value = flow.iter().zip(weights).map(|(f, w)| f * w).sum();
    Ok(FlowResult { value, flow, potentials })
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn successive_shortest_paths(mut res: Residual, s: usize, t: usize, demand: f64) -> Result<(Residual, Vec<f64>)> {
    let n = res.node_count();
    let eps = 1e-12 * demand.max(1.0);
    let mut pot = vec![0.0; n];
    let mut left = demand;
    let mut rounds = 0usize;
    while left > eps {
        rounds += 1;
        if rounds > 10 * res.head.len() + 10 {
            return Err(Error::Numerical("successive shortest paths did not terminate".into()));
        }
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::from([Item(0.0, s)]);
        dist[s] = 0.0;
        while let Some(Item(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &a in &res.adj[u] {
                if res.cap[a] <= eps {
                    continue;
                }
                let v = res.head[a];
                // Reduced costs are nonnegative up to round-off.
                let rc = (res.cost[a] + pot[u] - pot[v]).max(0.0);
                if d + rc < dist[v] {
                    dist[v] = d + rc;
                    pred[v] = a;
                    heap.push(Item(dist[v], v));
                }
            }
        }
        if !dist[t].is_finite() {
            return Err(Error::InfeasibleDemand { demand, max_flow: demand - left });
        }
        let dt = dist[t];
        for v in 0..n {
            pot[v] += dist[v].min(dt);
        }
        let mut push = left;
        let mut v = t;
        while v != s {
            push = push.min(res.cap[pred[v]]);
            v = res.head[pred[v] ^ 1];
        }
        let mut v = t;
        while v != s {
            res.push(pred[v], push);
            v = res.head[pred[v] ^ 1];
        }
        left -= push;
    }
    Ok((res, pot))
}

fn epsilon_relaxation(
    mut res: Residual,
    s: usize,
    t: usize,
    demand: f64,
    seed: u64,
) -> Result<(Residual, Vec<f64>)> {
    let n = res.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-12 * demand.max(1.0);
    let max_w = res.cost.iter().fold(0.0f64, |m, c| m.max(*c));
    let final_eps = 1e-9 / n as f64;
    let mut price = vec![0.0; n];
    let mut excess = vec![0.0; n];
    excess[s] = demand;
    excess[t] = -demand;
    let mut eps = max_w.max(final_eps);
    let mut budget = 200_000usize * n.max(4) * 30;
    loop {
        // Saturate every residual arc with negative reduced cost.
        for u in 0..n {
            for i in 0..res.adj[u].len() {
                let a = res.adj[u][i];
                let v = res.head[a];
                if res.cap[a] > tol && res.cost[a] + price[u] - price[v] < 0.0 {
                    let amt = res.cap[a];
                    res.push(a, amt);
                    excess[u] -= amt;
                    excess[v] += amt;
                }
            }
        }
        let mut active: Vec<usize> = (0..n).filter(|&u| excess[u] > tol).collect();
        while !active.is_empty() {
            budget = budget.checked_sub(1).ok_or_else(|| Error::Numerical("ε-relaxation did not converge".into()))?;
            let k = rng.gen_range(0..active.len());
            let u = active.swap_remove(k);
            if excess[u] <= tol {
                continue;
            }
            // Push along admissible arcs, relabelling when none remain.
            while excess[u] > tol {
                let mut pushed = false;
                for i in 0..res.adj[u].len() {
                    let a = res.adj[u][i];
                    let v = res.head[a];
                    if res.cap[a] > tol && res.cost[a] + price[u] - price[v] < 0.0 {
                        let amt = excess[u].min(res.cap[a]);
                        res.push(a, amt);
                        excess[u] -= amt;
                        let was_active = excess[v] > tol;
                        excess[v] += amt;
                        if !was_active && excess[v] > tol {
                            active.push(v);
                        }
                        pushed = true;
                        if excess[u] <= tol {
                            break;
                        }
                    }
                }
                if excess[u] > tol && !pushed {
                    let best = res.adj[u]
                        .iter()
                        .filter(|&&a| res.cap[a] > tol)
                        .map(|&a| price[res.head[a]] - res.cost[a])
                        .fold(f64::NEG_INFINITY, f64::max);
                    if !best.is_finite() {
                        return Err(Error::Numerical("active node without residual arcs".into()));
                    }
                    price[u] = best - eps;
                }
            }
        }
        if eps < final_eps {
            break;
        }
        eps /= 4.0;
    }
    // Report prices with the SSP sign convention: p_v - p_u <= c_uv.
    let pot = price.iter().map(|p| -p).collect();
    Ok((res, pot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = Network::with_nodes(2);
        net.add_arc(0, 1, 2.5, 3.0).unwrap();
        for b in [Backend::Centralized, Backend::AsyncRelaxation] {
            let r = min_cost_flow(&net, &[2.5], &[3.0], 0, 1, 1.0, b, 1).unwrap();
            assert_eq!(r.flow, vec![1.0]);
            assert!((r.value - 2.5).abs() < 1e-9);
        }
    }

    #[test]
    fn butterfly_single_sink() {
        let net = Network::butterfly();
        for b in [Backend::Centralized, Backend::AsyncRelaxation] {
            let r = min_cost_flow(&net, &net.costs(), &net.capacities(), 0, 5, 1.0, b, 3).unwrap();
            assert!((r.value - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_demand_is_distinct() {
        let net = Network::butterfly();
        let r = min_cost_flow(&net, &net.costs(), &net.capacities(), 0, 5, 3.0, Backend::Centralized, 0);
        assert!(matches!(r, Err(Error::InfeasibleDemand { .. })));
    }

    #[test]
    fn splits_over_capacity() {
        let net = Network::butterfly();
        for b in [Backend::Centralized, Backend::AsyncRelaxation] {
            let r = min_cost_flow(&net, &net.costs(), &net.capacities(), 0, 5, 2.0, b, 9).unwrap();
            // s-a-t1 (5) plus s-b-c-d-t1 (7).
            assert!((r.value - 12.0).abs() < 1e-8, "{b:?}: {}", r.value);
        }
    }
}
