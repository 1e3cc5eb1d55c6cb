use std::collections::VecDeque;

use crate::netmodel::{MulticastRequest, Network, Subgraph};
use crate::{Error, Result};

/// Flow values per arc with node potentials as a dual certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    /// Flow value for max-flow, total cost for min-cost flow.
    pub value: f64,
    pub flow: Vec<f64>,
    /// Min-cut side indicator (1 on the source side) for max-flow, node
    /// prices for min-cost flow.
    pub potentials: Vec<f64>,
}

/// Residual graph shared by the flow kernels. Arc `2e` is the forward copy
/// of input arc `e` and `2e + 1` its reverse.
#[derive(Clone, Debug)]
pub(crate) struct Residual {
    pub head: Vec<usize>,
    pub cap: Vec<f64>,
    pub cost: Vec<f64>,
    pub adj: Vec<Vec<usize>>,
}

impl Residual {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize, f64, f64)>) -> Self {
        let mut r = Residual { head: Vec::new(), cap: Vec::new(), cost: Vec::new(), adj: vec![Vec::new(); n] };
        for (u, v, cap, cost) in arcs {
            r.adj[u].push(r.head.len());
            r.head.push(v);
            r.cap.push(cap);
            r.cost.push(cost);
            r.adj[v].push(r.head.len());
            r.head.push(u);
            r.cap.push(0.0);
            r.cost.push(-cost);
        }
        r
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Flow on input arc `e` (the residual capacity of its reverse copy).
    pub fn flow(&self, e: usize) -> f64 {
        self.cap[2 * e + 1]
    }

    pub fn push(&mut self, a: usize, amount: f64) {
        self.cap[a] -= amount;
        self.cap[a ^ 1] += amount;
    }
}

/// Max-flow on raw arcs `(tail, head, capacity)` by shortest augmenting
/// paths. Returns the value, per-arc flow and source-side indicator.
pub fn max_flow_arcs(n: usize, arcs: &[(usize, usize, f64)], s: usize, t: usize) -> Result<FlowResult> {
    if s >= n || t >= n {
        return Err(Error::UnknownNode(s.max(t).to_string()));
    }
    if let Some(&(_, _, c)) = arcs.iter().find(|a| !(a.2 >= 0.0)) {
        return Err(Error::InvalidArgument(format!("negative capacity {c}")));
    }
    let mut res = Residual::new(n, arcs.iter().map(|&(u, v, c)| (u, v, c, 0.0)));
    let finite_total: f64 = arcs.iter().map(|a| a.2).filter(|c| c.is_finite()).sum();
    let eps = 1e-13 * finite_total.max(1.0);
    let mut value = 0.0;
    let mut pred = vec![usize::MAX; n];
    if s != t {
        loop {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut found = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &a in &res.adj[u] {
                    let v = res.head[a];
                    if v != s && pred[v] == usize::MAX && res.cap[a] > eps {
                        pred[v] = a;
                        if v == t {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !found {
                break;
            }
            let mut bottleneck = f64::INFINITY;
            let mut v = t;
            while v != s {
                let a = pred[v];
                bottleneck = bottleneck.min(res.cap[a]);
                v = res.head[a ^ 1];
            }
            if bottleneck.is_infinite() {
                let mut flow = vec![0.0; arcs.len()];
                let mut v = t;
                while v != s {
                    flow[pred[v] / 2] = f64::INFINITY;
                    v = res.head[pred[v] ^ 1];
                }
                let mut pot = vec![0.0; n];
                pot[s] = 1.0;
                return Ok(FlowResult { value: f64::INFINITY, flow, potentials: pot });
            }
            let mut v = t;
            while v != s {
                let a = pred[v];
                res.push(a, bottleneck);
                v = res.head[a ^ 1];
            }
            value += bottleneck;
        }
    }
    // Source side of the minimum cut.
    let mut side = vec![0.0; n];
    side[s] = 1.0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &a in &res.adj[u] {
            let v = res.head[a];
            if side[v] == 0.0 && res.cap[a] > eps {
                side[v] = 1.0;
                queue.push_back(v);
            }
        }
    }
    let flow: Vec<f64> = (0..arcs.len()).map(|e| res.flow(e)).collect();
    if cfg!(debug_assertions) && s != t {
        let cut: f64 = arcs.iter().filter(|a| side[a.0] == 1.0 && side[a.1] == 0.0).map(|a| a.2).sum();
        debug_assert!(
            (cut - value).abs() <= 1e-9 * value.max(1.0) + arcs.len() as f64 * eps,
            "flow {value} differs from cut {cut}"
        );
    }
    Ok(FlowResult { value, flow, potentials: side })
}

/// Max-flow from `s` to `t` with arc capacities `caps`.
pub fn max_flow(net: &Network, caps: &[f64], s: usize, t: usize) -> Result<FlowResult> {
    if caps.len() != net.arc_count() {
        return Err(Error::InvalidArgument("one capacity per arc required".into()));
    }
    let arcs: Vec<_> = net.arcs().iter().zip(caps).map(|(a, &c)| (a.tail, a.head, c)).collect();
    max_flow_arcs(net.node_count(), &arcs, s, t)
}

/// Capacity of the cut given by a source-side indicator.
pub fn cut_capacity(net: &Network, caps: &[f64], side: &[f64]) -> f64 {
    net.arcs()
        .iter()
        .zip(caps)
        .filter(|(a, _)| side[a.tail] == 1.0 && side[a.head] == 0.0)
        .map(|(_, c)| c)
        .sum()
}

/// Outcome of a multicast feasibility check.
#[derive(Clone, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Max-flow to each sink, in request order.
    pub max_flows: Vec<f64>,
}

impl Feasibility {
    pub fn min_flow(&self) -> f64 {
        self.max_flows.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A subgraph supports the multicast iff every sink's max-flow reaches `R`.
pub fn verify_feasible(net: &Network, z: &Subgraph, req: &MulticastRequest) -> Result<Feasibility> {
    let max_flows = req
        .sinks
        .iter()
        .map(|&t| max_flow(net, z.rates(), req.source, t).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let feasible = max_flows.iter().all(|&f| f >= req.rate - 1e-9);
    Ok(Feasibility { feasible, max_flows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn butterfly_half_rates() {
        let net = Network::butterfly();
        let z = Subgraph::new(vec![0.5; 9]).unwrap();
        for t in [5, 6] {
            let r = max_flow(&net, z.rates(), 0, t).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
            assert!((cut_capacity(&net, z.rates(), &r.potentials) - 1.0).abs() < 1e-12);
        }
        let req = MulticastRequest::new(7, 0, &[5, 6], 1.0).unwrap();
        assert!(verify_feasible(&net, &z, &req).unwrap().feasible);
        assert!(!verify_feasible(&net, &Subgraph::zeros(9), &req).unwrap().feasible);
    }

    #[test]
    fn no_path_gives_zero() {
        let mut net = Network::with_nodes(3);
        net.add_arc(0, 1, 1.0, 1.0).unwrap();
        assert_eq!(max_flow(&net, &[1.0], 0, 2).unwrap().value, 0.0);
    }

    #[test]
    fn integral_caps_give_integral_flow() {
        let net = Network::butterfly();
        let caps = [2.0, 1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 2.0, 1.0];
        let r = max_flow(&net, &caps, 0, 5).unwrap();
        assert_eq!(r.value, 3.0);
        assert!(r.flow.iter().all(|f| f.fract() == 0.0));
    }

    #[test]
    fn infinite_path() {
        let r = max_flow_arcs(2, &[(0, 1, f64::INFINITY)], 0, 1).unwrap();
        assert!(r.value.is_infinite());
    }
}
