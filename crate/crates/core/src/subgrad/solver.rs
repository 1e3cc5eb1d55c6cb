use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::projection::project_price_simplex;
use super::schedule::Schedule;
use crate::flowcore::{max_flow, min_cost_flow, shortest_path, Backend};
use crate::netmodel::io::Table;
use crate::netmodel::{FlowSet, Hypernetwork, MulticastRequest, Network, Subgraph};
use crate::wireless::{hyper_max_flows, nested_rates, wireless_dual_costs};
use crate::{row, Error, Result};

/// Largest relative deficit that the final scaling repair will absorb.
pub const REPAIR_TOL: f64 = 1e-6;

/// The linear-cost problem being dualised.
#[derive(Clone, Copy, Debug)]
pub enum DualProblem<'a> {
    Wireline(&'a Network),
    /// A nested lossless hypernetwork, solved over its pseudo-arcs.
    Wireless(&'a Hypernetwork),
}

/// Per-sink subproblem solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Subproblem {
    /// Valid only when every capacity is at least the rate.
    ShortestPath,
    MinCostFlow { backend: Backend },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubgradConfig {
    pub schedule: Schedule,
    pub iterations: usize,
    /// `None` picks shortest paths when capacities never bind.
    pub subproblem: Option<Subproblem>,
    /// Stop once the recovered cost is feasible and within this relative
    /// gap of the best dual value.
    pub gap_tol: Option<f64>,
    pub seed: u64,
}

impl Default for SubgradConfig {
    fn default() -> Self {
        SubgradConfig { schedule: Schedule::default(), iterations: 200, subproblem: None, gap_tol: None, seed: 0 }
    }
}

/// Dual prices `p[g][k]` for each price group `g` (an arc, or a nested
/// hyperarc level) and sink index `k`. Each row sums to its budget.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSet {
    pub budgets: Vec<f64>,
    pub p: Vec<Vec<f64>>,
}

impl PriceSet {
    /// Equal split of every budget across `sinks` sinks.
    pub fn uniform(budgets: &[f64], sinks: usize) -> Self {
        let p = budgets.iter().map(|&a| vec![a / sinks as f64; sinks]).collect();
        PriceSet { budgets: budgets.to_vec(), p }
    }

    /// Largest violation of the simplex constraints.
    pub fn simplex_violation(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.budgets)
            .map(|(row, &a)| {
                let neg = row.iter().fold(0.0f64, |m, &v| m.max(-v));
                neg.max((row.iter().sum::<f64>() - a).abs())
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub dual_value: f64,
    pub primal_cost: f64,
    /// `max(0, R - min_t maxflow_t(z))` for the recovered subgraph.
    pub feasibility_residual: f64,
}

#[derive(Clone, Debug)]
pub struct SubgradReport {
    pub trace: Vec<IterationRecord>,
    /// Final recovered subgraph, after the scaling repair when it applied.
    pub z: Subgraph,
    /// Recovered flows on arcs (wireline) or pseudo-arcs (wireless).
    pub xtilde: FlowSet,
    pub prices: PriceSet,
    pub cost: f64,
    pub feasible: bool,
    pub best_dual: f64,
    /// Scale factor applied by the repair, 1 when none was needed.
    pub repair_scale: f64,
}

impl SubgradReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn trace_table(&self) -> Table {
        let mut t = Table::new(&["n", "dual_value", "primal_cost", "feasibility_residual"]);
        for r in &self.trace {
            t.push(row![r.n, r.dual_value, r.primal_cost, r.feasibility_residual]);
        }
        t
    }
}

/// Problem reduced to a wireline graph whose arc prices aggregate groups.
struct Priced<'a> {
    graph: std::borrow::Cow<'a, Network>,
    budgets: Vec<f64>,
    /// Price groups summed into each graph arc.
    groups: Vec<Vec<usize>>,
    problem: DualProblem<'a>,
}

impl<'a> Priced<'a> {
    fn new(problem: DualProblem<'a>) -> Result<Self> {
        match problem {
            DualProblem::Wireline(net) => Ok(Priced {
                graph: std::borrow::Cow::Borrowed(net),
                budgets: net.costs(),
                groups: (0..net.arc_count()).map(|e| vec![e]).collect(),
                problem,
            }),
            DualProblem::Wireless(h) => {
                let budgets = wireless_dual_costs(h)?;
                let (graph, pseudo) = h.pseudo_network()?;
                let groups = pseudo.iter().map(|pa| h.out_hyperarcs(pa.tail)[..pa.level].to_vec()).collect();
                Ok(Priced { graph: std::borrow::Cow::Owned(graph), budgets, groups, problem })
            }
        }
    }

    fn check_feasible(&self, req: &MulticastRequest) -> Result<()> {
        let net = self.graph.as_ref();
        if req.source >= net.node_count() || req.sinks.iter().any(|&t| t >= net.node_count()) {
            return Err(Error::InvalidRequest("request refers to a node outside the network".into()));
        }
        for &t in &req.sinks {
            let f = max_flow(net, &net.capacities(), req.source, t)?.value;
            if f < req.rate - crate::FEASIBILITY_TOL {
                return Err(Error::Infeasible(format!(
                    "max-flow {f} to `{}` is below the rate {}",
                    net.name(t),
                    req.rate
                )));
            }
        }
        Ok(())
    }

    fn weights(&self, prices: &PriceSet, k: usize) -> Vec<f64> {
        self.groups.iter().map(|g| g.iter().map(|&m| prices.p[m][k]).sum::<f64>().max(0.0)).collect()
    }

    fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.budgets.len()];
        for (e, groups) in self.groups.iter().enumerate() {
            for &m in groups {
                g[m] += x[e];
            }
        }
        g
    }

    /// Recovered subgraph for flows `x` and its cost and feasibility residual.
    fn recover(&self, x: &FlowSet, req: &MulticastRequest) -> Result<(Subgraph, f64, f64)> {
        match self.problem {
            DualProblem::Wireline(net) => {
                let z = crate::netmodel::merge_flows_to_subgraph(x);
                let flows = req
                    .sinks
                    .iter()
                    .map(|&t| max_flow(net, z.rates(), req.source, t).map(|r| r.value))
                    .collect::<Result<Vec<_>>>()?;
                let low = flows.into_iter().fold(f64::INFINITY, f64::min);
                Ok((z.clone(), z.linear_cost(&net.costs()), low))
            }
            DualProblem::Wireless(h) => {
                let z = nested_rates(h, x)?;
                let low = hyper_max_flows(h, &z, req)?.into_iter().fold(f64::INFINITY, f64::min);
                Ok((z.clone(), z.linear_cost(&h.costs()), low))
            }
        }
    }
}

/// Solve one sink's subproblem; returns the flow and its priced cost.
fn solve_sink(
    net: &Network,
    weights: &[f64],
    req: &MulticastRequest,
    t: usize,
    sub: Subproblem,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    match sub {
        Subproblem::ShortestPath => {
            let path = shortest_path(net, weights, req.source, t)?;
            let x: Vec<f64> = path.unit_flow(net.arc_count()).into_iter().map(|v| v * req.rate).collect();
            let cost = x.iter().zip(weights).map(|(a, b)| a * b).sum();
            Ok((x, cost))
        }
        Subproblem::MinCostFlow { backend } => {
            let r = min_cost_flow(net, weights, &net.capacities(), req.source, t, req.rate, backend, seed)?;
            let cost = r.flow.iter().zip(weights).map(|(a, b)| a * b).sum();
            Ok((r.flow, cost))
        }
    }
}

/// Projected subgradient ascent on the Lagrangian dual with primal recovery.
pub fn dual_subgradient_solve(
    problem: DualProblem<'_>,
    req: &MulticastRequest,
    config: &SubgradConfig,
) -> Result<SubgradReport> {
    config.schedule.validate()?;
    if config.iterations == 0 {
        return Err(Error::InvalidArgument("at least one iteration is required".into()));
    }
    let priced = Priced::new(problem)?;
    priced.check_feasible(req)?;
    let net = priced.graph.as_ref();
    let fits = net.arcs().iter().all(|a| a.capacity >= req.rate);
    let sub = match config.subproblem {
        Some(Subproblem::ShortestPath) if !fits => {
            return Err(Error::InvalidArgument("shortest-path subproblems need every capacity to be at least the rate".into()))
        }
        Some(s) => s,
        None if fits => Subproblem::ShortestPath,
        None => Subproblem::MinCostFlow { backend: Backend::Centralized },
    };

    let sinks = req.sinks.len();
    let mut prices = PriceSet::uniform(&priced.budgets, sinks);
    let mut xtilde = FlowSet::zeros(&req.sinks, net.arc_count());
    let mut window: VecDeque<FlowSet> = VecDeque::new();
    let mut trace = Vec::with_capacity(config.iterations);
    let mut best_dual = f64::NEG_INFINITY;
    let mut last = None;

    for n in 1..=config.iterations {
        let solved = req
            .sinks
            .par_iter()
            .enumerate()
            .map(|(k, &t)| {
                let w = priced.weights(&prices, k);
                solve_sink(net, &w, req, t, sub, config.seed.wrapping_add(n as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        let dual_value: f64 = solved.iter().map(|(_, c)| c).sum();
        best_dual = best_dual.max(dual_value);
        let x = FlowSet { sinks: req.sinks.clone(), flows: solved.into_iter().map(|(f, _)| f).collect() };

        xtilde = match config.schedule {
            Schedule::ModifiedRecovery { window: size, .. } => {
                window.push_back(x.clone());
                if window.len() > size {
                    window.pop_front();
                }
                average(&window)
            }
            s if n == 1 => {
                debug_assert!((s.mu(1, 1) - 1.0).abs() < 1e-12);
                x.clone()
            }
            s => {
                let phi = s.phi(n - 1).expect("iterative weights");
                xtilde.combine(phi, &x, s.mu(n, n))
            }
        };

        let (z, cost, low) = priced.recover(&xtilde, req)?;
        let residual = (req.rate - low).max(0.0);
        trace.push(IterationRecord { n, dual_value, primal_cost: cost, feasibility_residual: residual });
        last = Some((z, cost, low));

        if let Some(gap) = config.gap_tol {
            if residual <= crate::FEASIBILITY_TOL && cost > 0.0 && (cost - best_dual) / cost <= gap {
                break;
            }
        }
        if n == config.iterations {
            break;
        }

        let theta = config.schedule.theta(n);
        let grads: Vec<Vec<f64>> = x.flows.iter().map(|f| priced.subgradient(f)).collect();
        prices.p = prices
            .p
            .par_iter()
            .enumerate()
            .map(|(g, row)| {
                let u: Vec<f64> = row.iter().enumerate().map(|(k, &v)| v + theta * grads[k][g]).collect();
                project_price_simplex(&u, prices.budgets[g])
            })
            .collect::<Result<Vec<_>>>()?;
        if prices.p.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: n });
        }
    }

    let (mut z, mut cost, low) = last.expect("at least one iteration");
    let mut feasible = low >= req.rate - crate::FEASIBILITY_TOL;
    let mut repair_scale = 1.0;
    if !feasible && low > 0.0 && (req.rate - low) / req.rate <= REPAIR_TOL {
        repair_scale = req.rate / low;
        z = z.scaled(repair_scale);
        cost *= repair_scale;
        feasible = true;
    }
    Ok(SubgradReport { trace, z, xtilde, prices, cost, feasible, best_dual, repair_scale })
}

fn average(window: &VecDeque<FlowSet>) -> FlowSet {
    let first = window.front().expect("nonempty window");
    let mut acc = FlowSet::zeros(&first.sinks, first.arc_count());
    let w = 1.0 / window.len() as f64;
    for x in window {
        acc = acc.combine(1.0, x, w);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn butterfly_request() -> (Network, MulticastRequest) {
        let net = Network::butterfly();
        let req = MulticastRequest::new(7, 0, &[5, 6], 1.0).unwrap();
        (net, req)
    }

    #[test]
    fn single_sink_is_the_shortest_path() {
        let net = Network::butterfly();
        let req = MulticastRequest::new(7, 0, &[5], 1.0).unwrap();
        let cfg = SubgradConfig { iterations: 1, ..Default::default() };
        let r = dual_subgradient_solve(DualProblem::Wireline(&net), &req, &cfg).unwrap();
        assert_eq!(r.prices.p, net.costs().iter().map(|&a| vec![a]).collect::<Vec<_>>());
        assert_eq!(r.cost, 5.0);
        assert_eq!(r.trace[0].dual_value, 5.0);
        assert!(r.feasible);
    }

    #[test]
    fn prices_stay_on_the_simplex() {
        let (net, req) = butterfly_request();
        let cfg = SubgradConfig { schedule: Schedule::PowerAlpha { alpha: 0.8 }, iterations: 50, ..Default::default() };
        let r = dual_subgradient_solve(DualProblem::Wireline(&net), &req, &cfg).unwrap();
        assert!(r.prices.simplex_violation() <= 1e-9);
        for rec in &r.trace {
            assert!(rec.dual_value <= 9.5 + 1e-9);
            if rec.feasibility_residual == 0.0 {
                assert!(rec.primal_cost >= 9.5 - 1e-9);
            }
        }
        let t = r.trace_table();
        assert_eq!(t.header, ["n", "dual_value", "primal_cost", "feasibility_residual"]);
        assert_eq!(t.len(), 50);
    }

    #[test]
    fn early_exit_on_gap() {
        let (net, req) = butterfly_request();
        let cfg = SubgradConfig {
            schedule: Schedule::PowerAlpha { alpha: 0.8 },
            iterations: 2000,
            gap_tol: Some(0.05),
            ..Default::default()
        };
        let r = dual_subgradient_solve(DualProblem::Wireline(&net), &req, &cfg).unwrap();
        assert!(r.iterations() < 2000);
        assert!(r.feasible && r.cost <= r.best_dual / 0.95 + 1e-9);
    }

    #[test]
    fn rejects_infeasible_and_bad_schedules() {
        let mut net = Network::with_nodes(3);
        net.add_arc(0, 1, 1.0, 1.0).unwrap();
        let req = MulticastRequest::new(3, 0, &[1, 2], 1.0).unwrap();
        let cfg = SubgradConfig::default();
        assert!(matches!(dual_subgradient_solve(DualProblem::Wireline(&net), &req, &cfg), Err(Error::Infeasible(_))));
        let net = Network::butterfly();
        let req = MulticastRequest::new(7, 0, &[5, 6], 1.0).unwrap();
        let bad = SubgradConfig { schedule: Schedule::PowerAlpha { alpha: 1.5 }, ..Default::default() };
        assert!(dual_subgradient_solve(DualProblem::Wireline(&net), &req, &bad).is_err());
        let req2 = MulticastRequest::new(7, 0, &[5, 6], 2.0).unwrap();
        let sp = SubgradConfig { subproblem: Some(Subproblem::ShortestPath), ..Default::default() };
        assert!(dual_subgradient_solve(DualProblem::Wireline(&net), &req2, &sp).is_err());
    }
}
