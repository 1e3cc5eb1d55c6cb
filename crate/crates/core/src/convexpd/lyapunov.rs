use super::state::{Gains, PDState};

/// Quadratic Lyapunov function for constant gains:
/// `sum (x - x^)^2 / 2k + (p - p^)^2 / 2h + (lambda - lambda^)^2 / 2m`,
/// plus the rate terms in elastic mode.
pub fn lyapunov_value(state: &PDState, equilibrium: &PDState, gains: &Gains) -> f64 {
    fn sq(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| (u - v) * (u - v)).sum()
    }
    let mut v = sq(&state.x.flows, &equilibrium.x.flows) / (2.0 * gains.k)
        + sq(&state.p, &equilibrium.p) / (2.0 * gains.h)
        + sq(&state.lambda, &equilibrium.lambda) / (2.0 * gains.m);
    if let (Some(r), Some(rh)) = (state.rate, equilibrium.rate) {
        v += (r - rh).powi(2) / (2.0 * gains.k_rate);
        v += (state.lambda_rate - equilibrium.lambda_rate).powi(2) / (2.0 * gains.m_rate);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::FlowSet;

    fn state(x: f64, p: f64, l: f64) -> PDState {
        PDState {
            x: FlowSet { sinks: vec![1], flows: vec![vec![x, 0.0]] },
            p: vec![vec![p, 0.0]],
            lambda: vec![vec![l, 0.0]],
            rate: None,
            lambda_rate: 0.0,
        }
    }

    #[test]
    fn zero_at_equilibrium_positive_elsewhere() {
        let eq = state(1.0, -2.0, 0.0);
        let g = Gains::default();
        assert_eq!(lyapunov_value(&eq, &eq, &g), 0.0);
        let v = lyapunov_value(&state(2.0, 0.0, 3.0), &eq, &g);
        assert_eq!(v, 0.5 * (1.0 + 4.0 + 9.0));
        let scaled = Gains { k: 2.0, h: 4.0, m: 0.5, ..g };
        assert_eq!(lyapunov_value(&state(2.0, 0.0, 3.0), &eq, &scaled), 0.25 + 0.5 + 9.0);
    }
}
