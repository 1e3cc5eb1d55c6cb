use super::gradient::{smoothed_cost, smoothed_rates};
use super::lyapunov::lyapunov_value;
use super::recover::recover_feasible;
use super::state::{Demand, PDParams, PDProblem, PDState, Utility};
use super::step::{kkt_residual, pd_step};
use crate::netmodel::io::{Cell, Table};
use crate::netmodel::{ConvexCost, MulticastRequest, Network, Subgraph};
use crate::{row, Error, Result};

/// Cost growth over the starting cost that is reported as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdRecord {
    pub m: usize,
    /// `sum_e f_e(z'_e)` at the raw iterate.
    pub raw_cost: f64,
    /// True cost of the subgraph recovered from the iterate, when any.
    pub recovered_cost: Option<f64>,
    pub lyapunov: Option<f64>,
    pub rate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PdReport {
    pub trace: Vec<PdRecord>,
    pub state: PDState,
    pub steps: usize,
    /// Smoothed rates `z'` of the final iterate.
    pub z_raw: Subgraph,
    /// Feasible subgraph recovered from `z_raw`, when one exists.
    pub z: Option<Subgraph>,
    /// Smoothed cost of the final iterate.
    pub cost: f64,
    pub recovered_cost: Option<f64>,
    /// `U_r(R) - cost` in elastic mode, `-cost` otherwise.
    pub objective: f64,
    pub kkt_residual: f64,
}

impl PdReport {
    pub fn rate(&self) -> Option<f64> {
        self.state.rate
    }

    pub fn trace_table(&self) -> Table {
        fn opt(v: Option<f64>) -> Cell {
            v.map_or(Cell::Text(String::new()), Cell::Float)
        }
        let mut t = Table::new(&["m", "raw_cost", "recovered_cost", "V", "R"]);
        for r in &self.trace {
            let mut cells = row![r.m, r.raw_cost];
            cells.extend([opt(r.recovered_cost), opt(r.lyapunov), opt(r.rate)]);
            t.push(cells);
        }
        t
    }
}

fn recovered(problem: &PDProblem<'_>, state: &PDState, z_raw: &Subgraph) -> Option<(Subgraph, f64)> {
    let r = state.current_rate(problem);
    let req = MulticastRequest::new(problem.net.node_count(), problem.source, &problem.sinks, r).ok()?;
    let z = recover_feasible(problem.net, z_raw, &req).ok()?;
    let c = problem.costs.total(z.rates());
    Some((z, c))
}

/// Run the primal-dual iteration from `init`, recording the Lyapunov
/// value against `monitor` when given.
pub fn pd_solve_from(
    problem: &PDProblem<'_>,
    params: &PDParams,
    init: PDState,
    monitor: Option<&PDState>,
) -> Result<PdReport> {
    params.validate()?;
    let gains = params.effective_gains();
    let mut state = init;
    let base = smoothed_cost(&state.x, problem.costs).max(1.0);
    let mut trace = Vec::new();
    let record = |m: usize, s: &PDState, trace: &mut Vec<PdRecord>| {
        let z_raw = Subgraph::from_clamped(smoothed_rates(&s.x, problem.costs));
        trace.push(PdRecord {
            m,
            raw_cost: problem.costs.total(z_raw.rates()),
            recovered_cost: recovered(problem, s, &z_raw).map(|(_, c)| c),
            lyapunov: monitor.map(|eq| lyapunov_value(s, eq, &gains)),
            rate: s.rate,
        });
    };
    if params.record_every > 0 {
        record(0, &state, &mut trace);
    }
    for m in 1..=params.iterations {
        state = pd_step(&state, params, problem)?;
        let c = smoothed_cost(&state.x, problem.costs);
        if !c.is_finite() || c > DIVERGENCE_FACTOR * base || state.rate.is_some_and(|r| !r.is_finite()) {
            return Err(Error::Diverged { step: m });
        }
        if params.record_every > 0 && (m % params.record_every == 0 || m == params.iterations) {
            record(m, &state, &mut trace);
        }
    }
    let z_raw = Subgraph::from_clamped(smoothed_rates(&state.x, problem.costs));
    let cost = problem.costs.total(z_raw.rates());
    let rec = recovered(problem, &state, &z_raw);
    let objective = match problem.demand {
        Demand::Fixed(_) => -cost,
        Demand::Elastic(u) => u.value(state.rate.unwrap_or(0.0)) - cost,
    };
    let kkt = kkt_residual(problem, &state);
    Ok(PdReport {
        trace,
        steps: params.iterations,
        z_raw,
        recovered_cost: rec.as_ref().map(|r| r.1),
        z: rec.map(|r| r.0),
        cost,
        objective,
        kkt_residual: kkt,
        state,
    })
}

/// Primal-dual solve of the smoothed convex problem from the zero state.
pub fn pd_solve(net: &Network, req: &MulticastRequest, costs: &ConvexCost, params: &PDParams) -> Result<PdReport> {
    let problem = PDProblem::fixed(net, req, costs)?;
    pd_solve_from(&problem, params, PDState::initial(&problem, params), None)
}

/// Primal-dual solve with an elastic rate valued by `utility`; sink
/// conservation rows are dropped.
pub fn elastic_pd_solve(
    net: &Network,
    source: usize,
    sinks: &[usize],
    costs: &ConvexCost,
    utility: Utility,
    params: &PDParams,
) -> Result<PdReport> {
    let problem = PDProblem::elastic(net, source, sinks, costs, utility)?;
    pd_solve_from(&problem, params, PDState::initial(&problem, params), None)
}

/// Iterate from `init` until the optimality residual drops to `tol`,
/// checking every `check_every` steps. The result is a numerical fixed
/// point of [`pd_step`].
pub fn reference_equilibrium(
    problem: &PDProblem<'_>,
    params: &PDParams,
    init: PDState,
    tol: f64,
    max_steps: usize,
) -> Result<(PDState, usize)> {
    params.validate()?;
    const CHECK_EVERY: usize = 1000;
    let mut state = init;
    let mut steps = 0;
    while steps < max_steps {
        for _ in 0..CHECK_EVERY {
            state = pd_step(&state, params, problem)?;
        }
        steps += CHECK_EVERY;
        let r = kkt_residual(problem, &state);
        if !r.is_finite() {
            return Err(Error::Diverged { step: steps });
        }
        if r <= tol {
            return Ok((state, steps));
        }
    }
    Err(Error::Numerical(format!(
        "no equilibrium within {max_steps} steps; residual {}",
        kkt_residual(problem, &state)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_arc() -> Network {
        let mut net = Network::with_nodes(2);
        net.add_arc(0, 1, 1.0, f64::INFINITY).unwrap();
        net
    }

    #[test]
    fn single_arc_reaches_unit_flow() {
        let net = single_arc();
        let req = MulticastRequest::new(2, 0, &[1], 1.0).unwrap();
        let c = ConvexCost::exponential(&[1.0], 2).unwrap();
        let r = pd_solve(&net, &req, &c, &PDParams::with_alpha(1e-2, 20_000)).unwrap();
        assert!((r.state.x.flows[0][0] - 1.0).abs() < 1e-6);
        assert!((r.cost - 1f64.exp()).abs() < 1e-5);
        assert!(r.kkt_residual < 1e-6);
    }

    #[test]
    fn huge_steps_diverge() {
        let net = Network::butterfly();
        let req = MulticastRequest::new(7, 0, &[5, 6], 1.0).unwrap();
        let c = ConvexCost::exponential(&net.costs(), 4).unwrap();
        let err = pd_solve(&net, &req, &c, &PDParams::with_alpha(5.0, 1000)).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }

    #[test]
    fn trace_columns() {
        let net = single_arc();
        let req = MulticastRequest::new(2, 0, &[1], 1.0).unwrap();
        let c = ConvexCost::exponential(&[1.0], 2).unwrap();
        let mut params = PDParams::with_alpha(1e-2, 100);
        params.record_every = 50;
        let r = pd_solve(&net, &req, &c, &params).unwrap();
        let t = r.trace_table();
        assert_eq!(t.header, ["m", "raw_cost", "recovered_cost", "V", "R"]);
        assert_eq!(t.len(), 3);
    }
}
