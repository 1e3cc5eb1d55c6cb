use crate::netmodel::{ConvexCost, FlowSet};

/// `z'_e = (sum_t |x_e^t|^n)^(1/n)` per arc.
pub fn smoothed_rates(x: &FlowSet, costs: &ConvexCost) -> Vec<f64> {
    let n = costs.smoothing as i32;
    (0..x.arc_count())
        .map(|e| {
            let big = x.flows.iter().map(|f| f[e].abs()).fold(0.0, f64::max);
            if big == 0.0 {
                return 0.0;
            }
            // Scale by the largest term so high exponents do not overflow.
            let s: f64 = x.flows.iter().map(|f| (f[e].abs() / big).powi(n)).sum();
            big * s.powf(1.0 / n as f64)
        })
        .collect()
}

/// `sum_e f_e(z'_e)`.
pub fn smoothed_cost(x: &FlowSet, costs: &ConvexCost) -> f64 {
    costs.total(&smoothed_rates(x, costs))
}

/// Gradient of `U(x) = -sum_e f_e(z'_e)`:
/// `dU/dx_e^t = -f_e'(z'_e) (x_e^t / z'_e)^(n-1)`, taken as zero when
/// `z'_e = 0`. Negative entries enter through `|x|` with their sign.
#[allow(non_snake_case)]
pub fn grad_U(x: &FlowSet, costs: &ConvexCost) -> Vec<Vec<f64>> {
    let z = smoothed_rates(x, costs);
    let n = costs.smoothing as i32;
    x.flows
        .iter()
        .map(|f| {
            f.iter()
                .enumerate()
                .map(|(e, &v)| {
                    if z[e] == 0.0 {
                        0.0
                    } else {
                        let r = v.abs() / z[e];
                        -costs.functions[e].derivative(z[e]) * r.powi(n - 1) * v.signum()
                    }
                })
                .collect()
        })
        .collect()
}
