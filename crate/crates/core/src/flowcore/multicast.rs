use super::lp::{solve_lp_exact, LinearProgram, LpSolution, Sense};
use crate::netmodel::{FlowSet, MulticastRequest, Network, Subgraph};
use crate::Result;

/// Column layout of the wireline multicast LP: `z_e` first, then one block
/// of arc flows per sink.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulticastLayout {
    pub arcs: usize,
    pub sinks: usize,
}

impl MulticastLayout {
    pub fn z(&self, e: usize) -> usize {
        e
    }

    pub fn x(&self, k: usize, e: usize) -> usize {
        self.arcs * (1 + k) + e
    }
}

/// Minimum linear cost subgraph supporting the multicast: rates `z`
/// bounded by capacities, one flow per sink of value `R` under `z`.
pub fn build_multicast_lp(net: &Network, req: &MulticastRequest) -> (LinearProgram, MulticastLayout) {
    let layout = MulticastLayout { arcs: net.arc_count(), sinks: req.sink_count() };
    let mut lp = LinearProgram::new();
    for a in net.arcs() {
        lp.add_var(a.cost, a.capacity);
    }
    for _ in &req.sinks {
        for _ in net.arcs() {
            lp.add_var(0.0, f64::INFINITY);
        }
    }
    for k in 0..layout.sinks {
        for e in 0..layout.arcs {
            lp.add_row(vec![(layout.x(k, e), 1.0), (layout.z(e), -1.0)], Sense::Le, 0.0);
        }
    }
    for (k, &t) in req.sinks.iter().enumerate() {
        for i in 0..net.node_count() {
            // The sink's own balance follows from the others.
            if i == t {
                continue;
            }
            let mut coeffs: Vec<(usize, f64)> = net.out_arcs(i).iter().map(|&e| (layout.x(k, e), 1.0)).collect();
            coeffs.extend(net.in_arcs(i).iter().map(|&e| (layout.x(k, e), -1.0)));
            lp.add_row(coeffs, Sense::Eq, req.sigma(i, t));
        }
    }
    (lp, layout)
}

#[derive(Clone, Debug)]
pub struct MulticastSolution {
    pub cost: f64,
    pub z: Subgraph,
    pub x: FlowSet,
    pub lp: LpSolution,
}

/// Solve the wireline multicast LP exactly.
pub fn solve_multicast_lp(net: &Network, req: &MulticastRequest) -> Result<MulticastSolution> {
    let (lp, layout) = build_multicast_lp(net, req);
    let sol = solve_lp_exact(&lp)?;
    let z = Subgraph::from_clamped((0..layout.arcs).map(|e| sol.x[layout.z(e)]).collect());
    let mut x = FlowSet::zeros(&req.sinks, layout.arcs);
    for k in 0..layout.sinks {
        for e in 0..layout.arcs {
            x.flows[k][e] = sol.x[layout.x(k, e)];
        }
    }
    Ok(MulticastSolution { cost: sol.value, z, x, lp: sol })
}
