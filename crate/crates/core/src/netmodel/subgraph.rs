use std::ops::Index;

use super::{MulticastRequest, Network};
use crate::{Error, Result};

/// Per-arc (or per-hyperarc) injection rates `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subgraph(Vec<f64>);

impl Subgraph {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return Err(Error::InvalidArgument(format!("subgraph rate {r} is not a finite nonnegative number")));
        }
        Ok(Subgraph(rates))
    }

    /// Build from rates that may carry tiny negative round-off; values are
    /// clamped at zero.
    pub fn from_clamped(rates: Vec<f64>) -> Self {
        Subgraph(rates.into_iter().map(|r| r.max(0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Subgraph(vec![0.0; len])
    }

    pub fn rates(&self) -> &[f64] {
        &self.0
    }

    pub fn into_rates(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Linear cost `sum a_e z_e`.
    pub fn linear_cost(&self, costs: &[f64]) -> f64 {
        self.0.iter().zip(costs).map(|(z, a)| z * a).sum()
    }

    pub fn scaled(&self, factor: f64) -> Subgraph {
        Subgraph(self.0.iter().map(|z| z * factor).collect())
    }

    /// Componentwise maximum.
    pub fn max_with(&self, other: &Subgraph) -> Subgraph {
        Subgraph(self.0.iter().zip(&other.0).map(|(a, b)| a.max(*b)).collect())
    }

    /// `self >= other` componentwise.
    pub fn dominates(&self, other: &Subgraph) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl Index<usize> for Subgraph {
    type Output = f64;
    fn index(&self, e: usize) -> &f64 {
        &self.0[e]
    }
}

/// One flow vector per sink, `flows[k][e]` for sink `sinks[k]` on arc `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowSet {
    pub sinks: Vec<usize>,
    pub flows: Vec<Vec<f64>>,
}

impl FlowSet {
    pub fn zeros(sinks: &[usize], arcs: usize) -> Self {
        FlowSet { sinks: sinks.to_vec(), flows: vec![vec![0.0; arcs]; sinks.len()] }
    }

    pub fn arc_count(&self) -> usize {
        self.flows.first().map_or(0, Vec::len)
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.flows.iter().flatten().all(|&x| x >= -tol)
    }

    /// `self * a + other * b`.
    pub fn combine(&self, a: f64, other: &FlowSet, b: f64) -> FlowSet {
        let flows = self
            .flows
            .iter()
            .zip(&other.flows)
            .map(|(u, v)| u.iter().zip(v).map(|(x, y)| a * x + b * y).collect())
            .collect();
        FlowSet { sinks: self.sinks.clone(), flows }
    }
}

/// Wireless flows `x_{iJj}^(t)`: `flows[k][e][p]` is the flow of sink
/// `sinks[k]` on hyperarc `e` towards its `p`-th end node.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperFlowSet {
    pub sinks: Vec<usize>,
    pub flows: Vec<Vec<Vec<f64>>>,
}

impl HyperFlowSet {
    pub fn zeros(sinks: &[usize], hyper: &super::Hypernetwork) -> Self {
        let shape: Vec<Vec<f64>> = hyper.hyperarcs().iter().map(|h| vec![0.0; h.heads.len()]).collect();
        HyperFlowSet { sinks: sinks.to_vec(), flows: vec![shape; sinks.len()] }
    }
}

/// `z_e = max_t x_e^(t)`.
pub fn merge_flows_to_subgraph(x: &FlowSet) -> Subgraph {
    let mut z = vec![0.0f64; x.arc_count()];
    for flow in &x.flows {
        for (z, &f) in z.iter_mut().zip(flow) {
            *z = z.max(f);
        }
    }
    Subgraph::from_clamped(z)
}

/// Round each rate up to the next multiple of `R / delta`.
pub fn quantize_subgraph(z: &Subgraph, rate: f64, delta: u32) -> Result<Subgraph> {
    if !(rate > 0.0) || delta == 0 {
        return Err(Error::InvalidArgument(format!(
            "quantization needs R > 0 and delta >= 1, got R = {rate}, delta = {delta}"
        )));
    }
    let step = rate / delta as f64;
    let d = delta as f64;
    let out = z
        .rates()
        .iter()
        .map(|&v| {
            let units = d * v / rate;
            // Values already on the grid (up to round-off) stay put.
            let nearest = units.round();
            let k = if (units - nearest).abs() <= 1e-12 * units.abs().max(1.0) {
                nearest
            } else {
                units.ceil()
            };
            k * step
        })
        .collect();
    Ok(Subgraph(out))
}

/// Largest violation `|outflow - inflow - sigma|` over all nodes and sinks.
pub fn conservation_residual(net: &Network, req: &MulticastRequest, x: &FlowSet) -> f64 {
    let mut worst = 0.0f64;
    for (k, &t) in x.sinks.iter().enumerate() {
        let flow = &x.flows[k];
        for i in 0..net.node_count() {
            let out: f64 = net.out_arcs(i).iter().map(|&e| flow[e]).sum();
            let inn: f64 = net.in_arcs(i).iter().map(|&e| flow[e]).sum();
            worst = worst.max((out - inn - req.sigma(i, t)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merge_single_sink() {
        let x = FlowSet { sinks: vec![1], flows: vec![vec![0.5, 0.0, 1.0]] };
        assert_eq!(merge_flows_to_subgraph(&x).rates(), &[0.5, 0.0, 1.0]);
    }

    #[test]
    fn merge_butterfly_triples() {
        // (z, x1, x2) triples from the coded butterfly solution.
        let x = FlowSet {
            sinks: vec![5, 6],
            flows: vec![vec![0.5, 0.5, 0.0], vec![0.5, 0.0, 0.5]],
        };
        assert_eq!(merge_flows_to_subgraph(&x).rates(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn quantize_examples() {
        let q = |v: f64| quantize_subgraph(&Subgraph::new(vec![v]).unwrap(), 1.0, 2).unwrap()[0];
        assert_eq!(q(0.0), 0.0);
        assert_eq!(q(0.5), 0.5);
        assert_eq!(q(0.3), 0.5);
        assert!(quantize_subgraph(&Subgraph::zeros(1), 0.0, 2).is_err());
        assert!(quantize_subgraph(&Subgraph::zeros(1), 1.0, 0).is_err());
    }

    #[test]
    fn residual_of_butterfly_flows() {
        let net = Network::butterfly();
        let req = MulticastRequest::new(7, 0, &[5, 6], 1.0).unwrap();
        // arcs: sa sb ac bc cd at1 bt2 dt1 dt2
        let x = FlowSet {
            sinks: vec![5, 6],
            flows: vec![
                vec![0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.0],
                vec![0.5, 0.5, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5],
            ],
        };
        assert!(conservation_residual(&net, &req, &x) < 1e-12);
        assert_eq!(merge_flows_to_subgraph(&x).rates(), &[0.5; 9]);
    }

    proptest! {
        #[test]
        fn merge_is_componentwise_max(x in proptest::collection::vec(proptest::collection::vec(0.0f64..5.0, 6), 3)) {
            let fs = FlowSet { sinks: vec![0, 1, 2], flows: x.clone() };
            let z = merge_flows_to_subgraph(&fs);
            for e in 0..6 {
                let mut m = 0.0f64;
                for k in 0..3 {
                    if x[k][e] > m { m = x[k][e]; }
                }
                prop_assert_eq!(z[e], m);
            }
        }

        #[test]
        fn quantize_bounds_idempotent_monotone(
            v in proptest::collection::vec(0.0f64..10.0, 5),
            bump in proptest::collection::vec(0.0f64..1.0, 5),
            rate in 0.1f64..4.0,
            delta in 1u32..9,
        ) {
            let z = Subgraph::new(v.clone()).unwrap();
            let q = quantize_subgraph(&z, rate, delta).unwrap();
            for e in 0..5 {
                prop_assert!(q[e] >= z[e] - 1e-12);
                prop_assert!(q[e] - z[e] < rate / delta as f64 + 1e-12);
            }
            let qq = quantize_subgraph(&q, rate, delta).unwrap();
            prop_assert_eq!(&qq, &q);
            let bigger = Subgraph::new(v.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
            let qb = quantize_subgraph(&bigger, rate, delta).unwrap();
            prop_assert!(qb.dominates(&q));
        }
    }
}
