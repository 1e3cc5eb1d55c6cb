use super::gradient::grad_U;
use super::state::{Demand, PDParams, PDProblem, PDState};
use crate::netmodel::FlowSet;
use crate::{Error, Result};

/// `(y)^+_w`: `y` when `w > 0`, otherwise `max(y, 0)`.
pub fn positive_part(y: f64, w: f64) -> f64 {
    if w > 0.0 {
        y
    } else {
        y.max(0.0)
    }
}

/// Time derivatives of every state block, evaluated at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    /// `dU/dx - q + lambda`
    pub x: Vec<Vec<f64>>,
    /// `y - sigma`, zero where the constraint is dropped.
    pub p: Vec<Vec<f64>>,
    /// `(-x)^+_lambda`
    pub lambda: Vec<Vec<f64>>,
    pub rate: f64,
    pub lambda_rate: f64,
}

impl Drift {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.p)
            .chain(&self.lambda)
            .flatten()
            .chain([&self.rate, &self.lambda_rate])
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Divergence `sum_out x - sum_in x` at every node for every sink.
pub fn divergence(problem: &PDProblem<'_>, x: &FlowSet) -> Vec<Vec<f64>> {
    x.flows
        .iter()
        .map(|f| {
            let mut y = vec![0.0; problem.net.node_count()];
            for (e, a) in problem.net.arcs().iter().enumerate() {
                y[a.tail] += f[e];
                y[a.head] -= f[e];
            }
            y
        })
        .collect()
}

/// Unscaled right-hand sides of the continuous-time dynamics.
pub fn drift(problem: &PDProblem<'_>, state: &PDState) -> Drift {
    let grad = grad_U(&state.x, problem.costs);
    let arcs = problem.net.arcs();
    let r = state.current_rate(problem);
    let gx = (0..problem.sinks.len())
        .map(|k| {
            arcs.iter()
                .enumerate()
                .map(|(e, a)| grad[k][e] - (state.p[k][a.tail] - state.p[k][a.head]) + state.lambda[k][e])
                .collect()
        })
        .collect();
    let y = divergence(problem, &state.x);
    let gp = y
        .iter()
        .enumerate()
        .map(|(k, yk)| {
            yk.iter()
                .enumerate()
                .map(|(i, &v)| {
                    if problem.is_elastic() && i == problem.sinks[k] {
                        0.0
                    } else {
                        v - problem.sigma(i, k, r)
                    }
                })
                .collect()
        })
        .collect();
    let gl = state
        .x
        .flows
        .iter()
        .zip(&state.lambda)
        .map(|(f, l)| f.iter().zip(l).map(|(&x, &lam)| positive_part(-x, lam)).collect())
        .collect();
    let (g_rate, g_lrate) = match problem.demand {
        Demand::Fixed(_) => (0.0, 0.0),
        Demand::Elastic(u) => {
            let q_r: f64 = -state.p.iter().map(|p| p[problem.source]).sum::<f64>();
            (u.derivative(r) - q_r + state.lambda_rate, positive_part(-r, state.lambda_rate))
        }
    };
    Drift { x: gx, p: gp, lambda: gl, rate: g_rate, lambda_rate: g_lrate }
}

/// One synchronous discrete step: all right-hand sides come from the
/// current state and are applied together. Multipliers are clipped at zero
/// after the step.
pub fn pd_step(state: &PDState, params: &PDParams, problem: &PDProblem<'_>) -> Result<PDState> {
    if state.min_lambda() < 0.0 {
        return Err(Error::InvalidArgument("multipliers must be nonnegative".into()));
    }
    let d = drift(problem, state);
    let g = params.effective_gains();
    let mut next = state.clone();
    for k in 0..problem.sinks.len() {
        for (x, dx) in next.x.flows[k].iter_mut().zip(&d.x[k]) {
            *x += g.k * dx;
        }
        for (p, dp) in next.p[k].iter_mut().zip(&d.p[k]) {
            *p += g.h * dp;
        }
        for (l, dl) in next.lambda[k].iter_mut().zip(&d.lambda[k]) {
            *l = (*l + g.m * dl).max(0.0);
        }
    }
    if let Some(r) = next.rate.as_mut() {
        *r += g.k_rate * d.rate;
        next.lambda_rate = (next.lambda_rate + g.m_rate * d.lambda_rate).max(0.0);
    }
    Ok(next)
}

/// Largest violation of the optimality conditions: stationarity in `x`
/// (and `R`), conservation, sign constraints and complementary slackness.
pub fn kkt_residual(problem: &PDProblem<'_>, state: &PDState) -> f64 {
    let d = drift(problem, state);
    let mut worst = d.x.iter().chain(&d.p).flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for (f, l) in state.x.flows.iter().zip(&state.lambda) {
        for (&x, &lam) in f.iter().zip(l) {
            worst = worst.max(-x).max(-lam).max((x * lam).abs());
        }
    }
    if let Some(r) = state.rate {
        worst = worst.max(d.rate.abs()).max(-r).max((r * state.lambda_rate).abs());
    }
    worst
}
