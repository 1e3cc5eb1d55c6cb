use crate::flowcore::{max_flow_arcs, solve_lp_exact, LinearProgram, LpSolution, Sense};
use crate::netmodel::{FlowSet, HyperFlowSet, Hypernetwork, MulticastRequest, PseudoArc, Subgraph};
use crate::{Error, Result};

use super::reception_prob_b;

/// Default bound on `|J|` for enumerating subset constraints.
pub const CONSTRAINT_BOUND: usize = 10;

/// Column layout for the hyperarc formulations: `z_e` first, then for each
/// sink one variable per (hyperarc, end node) incidence.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperLayout {
    pub hyperarcs: usize,
    /// Offset of hyperarc `e`'s incidences within a sink block.
    pub offsets: Vec<usize>,
    pub incidences: usize,
}

impl HyperLayout {
    fn new(h: &Hypernetwork) -> Self {
        let mut offsets = Vec::with_capacity(h.hyperarc_count());
        let mut acc = 0;
        for a in h.hyperarcs() {
            offsets.push(acc);
            acc += a.heads.len();
        }
        HyperLayout { hyperarcs: h.hyperarc_count(), offsets, incidences: acc }
    }

    pub fn z(&self, e: usize) -> usize {
        e
    }

    pub fn x(&self, k: usize, e: usize, p: usize) -> usize {
        self.hyperarcs + k * self.incidences + self.offsets[e] + p
    }
}

/// Column layout for the nested formulation: `z_e` first, then one block of
/// pseudo-arc flows per sink.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedLayout {
    pub hyperarcs: usize,
    pub pseudo: Vec<PseudoArc>,
}

impl NestedLayout {
    pub fn z(&self, e: usize) -> usize {
        e
    }

    pub fn x(&self, k: usize, a: usize) -> usize {
        self.hyperarcs + k * self.pseudo.len() + a
    }
}

fn check_request(h: &Hypernetwork, req: &MulticastRequest) -> Result<()> {
    let n = h.node_count();
    if req.source >= n || req.sinks.iter().any(|&t| t >= n) {
        return Err(Error::InvalidRequest("request refers to a node outside the network".into()));
    }
    Ok(())
}

fn hyper_lp(h: &Hypernetwork, req: &MulticastRequest, lossy: bool, bound: usize) -> Result<(LinearProgram, HyperLayout)> {
    check_request(h, req)?;
    let layout = HyperLayout::new(h);
    let mut lp = LinearProgram::new();
    for a in h.hyperarcs() {
        lp.add_var(a.cost, f64::INFINITY);
    }
    for _ in 0..req.sink_count() * layout.incidences {
        lp.add_var(0.0, f64::INFINITY);
    }
    for k in 0..req.sink_count() {
        for (e, a) in h.hyperarcs().iter().enumerate() {
            let size = a.heads.len();
            if lossy {
                if size > bound {
                    return Err(Error::InvalidArgument(format!(
                        "hyperarc from `{}` has {size} end nodes, more than the bound {bound}",
                        h.name(a.tail)
                    )));
                }
                for mask in 1u32..(1 << size) {
                    let subset: Vec<usize> = (0..size).filter(|p| mask >> p & 1 == 1).map(|p| a.heads[p]).collect();
                    let b = reception_prob_b(h, e, &subset)?;
                    let mut row: Vec<(usize, f64)> =
                        (0..size).filter(|p| mask >> p & 1 == 1).map(|p| (layout.x(k, e, p), 1.0)).collect();
                    row.push((layout.z(e), -b));
                    lp.add_row(row, Sense::Le, 0.0);
                }
            } else {
                let mut row: Vec<(usize, f64)> = (0..size).map(|p| (layout.x(k, e, p), 1.0)).collect();
                row.push((layout.z(e), -1.0));
                lp.add_row(row, Sense::Le, 0.0);
            }
        }
    }
    // Balance rows: outflow counts every incidence of i's hyperarcs.
    let mut inflow: Vec<Vec<(usize, usize)>> = vec![Vec::new(); h.node_count()];
    for (e, a) in h.hyperarcs().iter().enumerate() {
        for (p, &j) in a.heads.iter().enumerate() {
            inflow[j].push((e, p));
        }
    }
    for (k, &t) in req.sinks.iter().enumerate() {
        for i in 0..h.node_count() {
            if i == t {
                continue;
            }
            let mut row = Vec::new();
            for &e in h.out_hyperarcs(i) {
                for p in 0..h.hyperarc(e).heads.len() {
                    row.push((layout.x(k, e, p), 1.0));
                }
            }
            row.extend(inflow[i].iter().map(|&(e, p)| (layout.x(k, e, p), -1.0)));
            lp.add_row(row, Sense::Eq, req.sigma(i, t));
        }
    }
    Ok((lp, layout))
}

/// The lossy formulation with one capacity constraint per subset of each
/// hyperarc's end nodes.
pub fn build_lp_lossy(h: &Hypernetwork, req: &MulticastRequest, bound: usize) -> Result<(LinearProgram, HyperLayout)> {
    hyper_lp(h, req, true, bound)
}

/// The lossless formulation: total flow on a hyperarc bounded by its rate.
pub fn build_lp_lossless(h: &Hypernetwork, req: &MulticastRequest) -> Result<(LinearProgram, HyperLayout)> {
    hyper_lp(h, req, false, usize::MAX)
}

/// The nested formulation over pseudo-arcs with cumulative rate constraints.
pub fn build_lp_nested(h: &Hypernetwork, req: &MulticastRequest) -> Result<(LinearProgram, NestedLayout)> {
    check_request(h, req)?;
    let pseudo = h.pseudo_arcs()?;
    let layout = NestedLayout { hyperarcs: h.hyperarc_count(), pseudo };
    let mut lp = LinearProgram::new();
    for a in h.hyperarcs() {
        lp.add_var(a.cost, f64::INFINITY);
    }
    for _ in 0..req.sink_count() * layout.pseudo.len() {
        lp.add_var(0.0, f64::INFINITY);
    }
    let mut by_tail: Vec<Vec<usize>> = vec![Vec::new(); h.node_count()];
    let mut by_head: Vec<Vec<usize>> = vec![Vec::new(); h.node_count()];
    for (a, pa) in layout.pseudo.iter().enumerate() {
        by_tail[pa.tail].push(a);
        by_head[pa.head].push(a);
    }
    for k in 0..req.sink_count() {
        for i in 0..h.node_count() {
            let levels = h.out_hyperarcs(i);
            for m in 1..=levels.len() {
                let mut row: Vec<(usize, f64)> = levels[m - 1..].iter().map(|&e| (layout.z(e), 1.0)).collect();
                row.extend(
                    by_tail[i].iter().filter(|&&a| layout.pseudo[a].level >= m).map(|&a| (layout.x(k, a), -1.0)),
                );
                lp.add_row(row, Sense::Ge, 0.0);
            }
        }
    }
    for (k, &t) in req.sinks.iter().enumerate() {
        for i in 0..h.node_count() {
            if i == t {
                continue;
            }
            let mut row: Vec<(usize, f64)> = by_tail[i].iter().map(|&a| (layout.x(k, a), 1.0)).collect();
            row.extend(by_head[i].iter().map(|&a| (layout.x(k, a), -1.0)));
            lp.add_row(row, Sense::Eq, req.sigma(i, t));
        }
    }
    Ok((lp, layout))
}

#[derive(Clone, Debug)]
pub struct HyperSolution {
    pub cost: f64,
    pub z: Subgraph,
    pub x: HyperFlowSet,
    pub lp: LpSolution,
}

#[derive(Clone, Debug)]
pub struct NestedSolution {
    pub cost: f64,
    pub z: Subgraph,
    /// Flows on the pseudo-arcs, in [`Hypernetwork::pseudo_arcs`] order.
    pub xhat: FlowSet,
    pub lp: LpSolution,
}

fn unpack_hyper(h: &Hypernetwork, req: &MulticastRequest, layout: &HyperLayout, sol: LpSolution) -> HyperSolution {
    let z = Subgraph::from_clamped((0..layout.hyperarcs).map(|e| sol.x[layout.z(e)]).collect());
    let mut x = HyperFlowSet::zeros(&req.sinks, h);
    for k in 0..req.sink_count() {
        for (e, a) in h.hyperarcs().iter().enumerate() {
            for p in 0..a.heads.len() {
                x.flows[k][e][p] = sol.x[layout.x(k, e, p)];
            }
        }
    }
    HyperSolution { cost: sol.value, z, x, lp: sol }
}

pub fn solve_lossy(h: &Hypernetwork, req: &MulticastRequest) -> Result<HyperSolution> {
    let (lp, layout) = build_lp_lossy(h, req, CONSTRAINT_BOUND)?;
    let sol = solve_lp_exact(&lp)?;
    Ok(unpack_hyper(h, req, &layout, sol))
}

pub fn solve_lossless(h: &Hypernetwork, req: &MulticastRequest) -> Result<HyperSolution> {
    let (lp, layout) = build_lp_lossless(h, req)?;
    let sol = solve_lp_exact(&lp)?;
    Ok(unpack_hyper(h, req, &layout, sol))
}

pub fn solve_nested(h: &Hypernetwork, req: &MulticastRequest) -> Result<NestedSolution> {
    let (lp, layout) = build_lp_nested(h, req)?;
    let sol = solve_lp_exact(&lp)?;
    let z = Subgraph::from_clamped((0..layout.hyperarcs).map(|e| sol.x[layout.z(e)]).collect());
    let mut xhat = FlowSet::zeros(&req.sinks, layout.pseudo.len());
    for k in 0..req.sink_count() {
        for a in 0..layout.pseudo.len() {
            xhat.flows[k][a] = sol.x[layout.x(k, a)];
        }
    }
    Ok(NestedSolution { cost: sol.value, z, xhat, lp: sol })
}

/// Fix the hyperarc rates of an LP to `z` (as equalities) and re-solve.
pub fn solve_with_fixed_rates(mut lp: LinearProgram, z: &Subgraph) -> Result<LpSolution> {
    for (e, &v) in z.rates().iter().enumerate() {
        lp.add_row(vec![(e, 1.0)], Sense::Eq, v);
    }
    solve_lp_exact(&lp)
}

/// Max-flow from the source to each sink when hyperarc `e` can carry
/// `z_e` in total towards any of its end nodes (lossless reception).
pub fn hyper_max_flows(h: &Hypernetwork, z: &Subgraph, req: &MulticastRequest) -> Result<Vec<f64>> {
    check_request(h, req)?;
    let n = h.node_count();
    let mut arcs = Vec::new();
    for (e, a) in h.hyperarcs().iter().enumerate() {
        let mid = n + e;
        arcs.push((a.tail, mid, z[e]));
        for &j in &a.heads {
            arcs.push((mid, j, f64::INFINITY));
        }
    }
    let total = n + h.hyperarc_count();
    req.sinks.iter().map(|&t| max_flow_arcs(total, &arcs, req.source, t).map(|r| r.value)).collect()
}

/// Lossless multicast feasibility of hyperarc rates `z`.
pub fn verify_hyper_feasible(h: &Hypernetwork, z: &Subgraph, req: &MulticastRequest) -> Result<bool> {
    Ok(hyper_max_flows(h, z, req)?.iter().all(|&f| f >= req.rate - 1e-9))
}

/// Largest violation of the lossless constraints by `(x, z)`: negative
/// flows, hyperarc overuse and flow imbalance.
pub fn lossless_violation(h: &Hypernetwork, req: &MulticastRequest, x: &HyperFlowSet, z: &Subgraph) -> f64 {
    let mut worst = 0.0f64;
    for (k, &t) in x.sinks.iter().enumerate() {
        let mut balance = vec![0.0; h.node_count()];
        for (e, a) in h.hyperarcs().iter().enumerate() {
            let used: f64 = x.flows[k][e].iter().sum();
            worst = worst.max(used - z[e]);
            for (p, &j) in a.heads.iter().enumerate() {
                let f = x.flows[k][e][p];
                worst = worst.max(-f);
                balance[a.tail] += f;
                balance[j] -= f;
            }
        }
        for (i, b) in balance.iter().enumerate() {
            worst = worst.max((b - req.sigma(i, t)).abs());
        }
    }
    worst
}

/// Largest violation of the nested constraints by `(xhat, z)`.
pub fn nested_violation(h: &Hypernetwork, req: &MulticastRequest, xhat: &FlowSet, z: &Subgraph) -> Result<f64> {
    let pseudo = h.pseudo_arcs()?;
    let mut worst = 0.0f64;
    for (k, &t) in xhat.sinks.iter().enumerate() {
        let mut balance = vec![0.0; h.node_count()];
        for (a, pa) in pseudo.iter().enumerate() {
            let f = xhat.flows[k][a];
            worst = worst.max(-f);
            balance[pa.tail] += f;
            balance[pa.head] -= f;
        }
        for (i, b) in balance.iter().enumerate() {
            worst = worst.max((b - req.sigma(i, t)).abs());
        }
        for i in 0..h.node_count() {
            let levels = h.out_hyperarcs(i);
            for m in 1..=levels.len() {
                let supply: f64 = levels[m - 1..].iter().map(|&e| z[e]).sum();
                let demand: f64 = pseudo
                    .iter()
                    .enumerate()
                    .filter(|(_, pa)| pa.tail == i && pa.level >= m)
                    .map(|(a, _)| xhat.flows[k][a])
                    .sum();
                worst = worst.max(demand - supply);
            }
        }
    }
    Ok(worst)
}
