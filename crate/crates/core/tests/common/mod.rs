#![allow(dead_code)]

use mincast::netmodel::{Hypernetwork, MulticastRequest, Network};
use mincast::wireless::hyper_max_flows;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph with integer costs in `1..=max_cost` and integer
/// capacities in `1..=max_cap`, plus a Hamiltonian path 0 -> 1 -> ... so
/// that the last node is reachable from node 0.
pub fn random_network(n: usize, density: f64, max_cost: u32, max_cap: u32, seed: u64) -> Network {
    let mut r = rng(seed);
    let mut net = Network::with_nodes(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if j == i + 1 || r.gen::<f64>() < density {
                let c = r.gen_range(1..=max_cost) as f64;
                let u = r.gen_range(1..=max_cap) as f64;
                net.add_arc(i, j, c, u).unwrap();
            }
        }
    }
    net
}

/// All simple paths from `s` to `t` as arc lists.
pub fn simple_paths(net: &Network, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(net: &Network, u: usize, t: usize, seen: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if u == t {
            out.push(path.clone());
            return;
        }
        for &e in net.out_arcs(u) {
            let v = net.arc(e).head;
            if !seen[v] {
                seen[v] = true;
                path.push(e);
                go(net, v, t, seen, path, out);
                path.pop();
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; net.node_count()];
    seen[s] = true;
    let mut out = Vec::new();
    go(net, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// A connected-enough request on a generated instance: source 0 and sinks
/// reachable at full rate, or `None`.
pub fn request_for(h: &Hypernetwork, sinks: usize, seed: u64) -> Option<MulticastRequest> {
    let n = h.node_count();
    let z = mincast::netmodel::Subgraph::new(vec![1e6; h.hyperarc_count()]).unwrap();
    let all: Vec<usize> = (1..n).collect();
    let probe = MulticastRequest::new(n, 0, &all, 1.0).ok()?;
    let flows = hyper_max_flows(h, &z, &probe).ok()?;
    let mut reach: Vec<usize> = all.into_iter().zip(flows).filter(|(_, f)| *f >= 1.0).map(|(t, _)| t).collect();
    if reach.len() < sinks {
        return None;
    }
    reach.shuffle(&mut rng(seed));
    MulticastRequest::new(n, 0, &reach[..sinks], 1.0).ok()
}


/// Projection onto `{v >= 0, sum v = total}` by bisection on the shift.
pub fn bisection_simplex(u: &[f64], total: f64) -> Vec<f64> {
    let hi0 = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (hi0 - total - 1.0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let s: f64 = u.iter().map(|v| (v - mid).max(0.0)).sum();
        if s > total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    u.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Accelerated projected gradient over path flows for
/// `min sum_e f_e((sum_t (x_e^t)^n)^(1/n))` with uncapacitated rate-`R`
/// flows. The norm is not differentiable where every sink leaves an arc
/// empty, so it is replaced by `(sum_t (x_e^t)^n + d^n)^(1/n)` with `d`
/// shrinking to `1e-7`; each stage restarts from the previous one. Returns
/// `(cost of the final flows, smoothing error bound, arc flows per sink)`;
/// the optimum lies in `[cost - bound, cost]`.
pub fn projected_gradient_oracle(
    net: &Network,
    req: &MulticastRequest,
    costs: &mincast::netmodel::ConvexCost,
    iters_per_stage: usize,
) -> (f64, f64, Vec<Vec<f64>>) {
    let n = costs.smoothing as f64;
    let m = net.arc_count();
    let paths: Vec<Vec<Vec<usize>>> = req.sinks.iter().map(|&t| simple_paths(net, req.source, t)).collect();
    let to_arcs = |w: &[Vec<f64>]| -> Vec<Vec<f64>> {
        w.iter()
            .zip(&paths)
            .map(|(wk, pk)| {
                let mut x = vec![0.0; m];
                for (v, p) in wk.iter().zip(pk) {
                    for &e in p {
                        x[e] += v;
                    }
                }
                x
            })
            .collect()
    };
    let rates = |x: &[Vec<f64>], d: f64| -> Vec<f64> {
        (0..m).map(|e| (x.iter().map(|f| f[e].max(0.0).powf(n)).sum::<f64>() + d.powf(n)).powf(1.0 / n)).collect()
    };
    let value = |w: &[Vec<f64>], d: f64| -> f64 {
        let z = rates(&to_arcs(w), d);
        (0..m).map(|e| costs.functions[e].value(z[e])).sum()
    };
    let grad = |w: &[Vec<f64>], d: f64| -> Vec<Vec<f64>> {
        let x = to_arcs(w);
        let z = rates(&x, d);
        x.iter()
            .zip(&paths)
            .map(|(xk, pk)| {
                let ge: Vec<f64> = (0..m)
                    .map(|e| {
                        if z[e] == 0.0 {
                            0.0
                        } else {
                            costs.functions[e].derivative(z[e]) * (xk[e].max(0.0) / z[e]).powf(n - 1.0)
                        }
                    })
                    .collect();
                pk.iter().map(|p| p.iter().map(|&e| ge[e]).sum()).collect()
            })
            .collect()
    };
    let project = |u: Vec<Vec<f64>>| -> Vec<Vec<f64>> { u.iter().map(|uk| bisection_simplex(uk, req.rate)).collect() };
    let inner = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 { a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| u * v).sum() };
    let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
        a.iter().zip(b).map(|(u, v)| u.iter().zip(v).map(|(p, q)| p - q).collect()).collect()
    };
    let mut w: Vec<Vec<f64>> = paths.iter().map(|pk| vec![req.rate / pk.len() as f64; pk.len()]).collect();
    let mut d = 0.1;
    let mut lip = 1.0;
    while d >= 1e-7 {
        let mut y = w.clone();
        let mut t: f64 = 1.0;
        for _ in 0..iters_per_stage {
            let g = grad(&y, d);
            let fy = value(&y, d);
            let next = loop {
                let cand = project(y.iter().zip(&g).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p - q / lip).collect()).collect());
                let step = diff(&cand, &y);
                if value(&cand, d) <= fy + inner(&g, &step) + 0.5 * lip * inner(&step, &step) + 1e-14 {
                    break cand;
                }
                lip *= 2.0;
            };
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let mom = diff(&next, &w);
            // Restart the momentum whenever the objective goes up.
            if value(&next, d) > value(&w, d) {
                y = w.clone();
                t = 1.0;
                continue;
            }
            y = next.iter().zip(&mom).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p + (t - 1.0) / t_next * q).collect()).collect();
            w = next;
            t = t_next;
            lip *= 0.9;
        }
        d *= 0.1;
    }
    let x = to_arcs(&w);
    let bound: f64 = (0..m)
        .map(|e| costs.functions[e].derivative(rates(&x, 0.0)[e] + 1e-6) * 1e-6)
        .sum();
    (value(&w, 0.0), bound, x)
}
