use crate::netmodel::{FlowSet, HyperFlowSet, Hypernetwork, Subgraph};
use crate::{Error, Result};

/// `s_e = a_e - a_prev` along each node's nested sequence, with the first
/// level anchored at zero.
pub fn wireless_dual_costs(h: &Hypernetwork) -> Result<Vec<f64>> {
    h.check_nested()?;
    let mut s = vec![0.0; h.hyperarc_count()];
    for i in 0..h.node_count() {
        let mut prev = 0.0;
        for &e in h.out_hyperarcs(i) {
            let a = h.hyperarc(e).cost;
            s[e] = a - prev;
            prev = a;
        }
    }
    if let Some(v) = s.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidNetwork(format!("nested cost increment {v} is not positive")));
    }
    Ok(s)
}

/// Collapse hyperarc flows onto pseudo-arcs:
/// `xhat_ij = sum over levels m >= m(i,j) of x_{iJ_m j}`.
pub fn reduce_to_hat(h: &Hypernetwork, x: &HyperFlowSet) -> Result<FlowSet> {
    let pseudo = h.pseudo_arcs()?;
    let mut xhat = FlowSet::zeros(&x.sinks, pseudo.len());
    for (a, pa) in pseudo.iter().enumerate() {
        for &e in &h.out_hyperarcs(pa.tail)[pa.level - 1..] {
            let p = h.hyperarc(e).heads.binary_search(&pa.head).expect("nested");
            for k in 0..x.sinks.len() {
                xhat.flows[k][a] += x.flows[k][e][p];
            }
        }
    }
    Ok(xhat)
}

/// Minimal nested rates for pseudo-arc flows, by the backward recursion
/// `z_m = max_t(demand_m) - sum_{l > m} z_l`.
pub fn nested_rates(h: &Hypernetwork, xhat: &FlowSet) -> Result<Subgraph> {
    let pseudo = h.pseudo_arcs()?;
    let mut z = vec![0.0; h.hyperarc_count()];
    for i in 0..h.node_count() {
        let levels = h.out_hyperarcs(i);
        let mut above = 0.0;
        for m in (1..=levels.len()).rev() {
            let demand = (0..xhat.sinks.len())
                .map(|k| {
                    pseudo
                        .iter()
                        .enumerate()
                        .filter(|(_, pa)| pa.tail == i && pa.level >= m)
                        .map(|(a, _)| xhat.flows[k][a])
                        .sum::<f64>()
                })
                .fold(0.0f64, f64::max);
            let v = (demand - above).max(0.0);
            z[levels[m - 1]] = v;
            above += v;
        }
    }
    Ok(Subgraph::from_clamped(z))
}

/// Lift pseudo-arc flows back to hyperarc flows. Rates come from the
/// backward recursion unless `z_target` is supplied; flows are split
/// greedily, end nodes in decreasing level order, each filling the highest
/// levels first.
pub fn expand_from_hat(
    h: &Hypernetwork,
    xhat: &FlowSet,
    z_target: Option<&Subgraph>,
) -> Result<(HyperFlowSet, Subgraph)> {
    let pseudo = h.pseudo_arcs()?;
    if xhat.arc_count() != pseudo.len() && !xhat.flows.is_empty() {
        return Err(Error::InvalidArgument("flows do not match the pseudo-arcs".into()));
    }
    if let Some(v) = xhat.flows.iter().flatten().find(|v| **v < -1e-12) {
        return Err(Error::InvalidArgument(format!("negative pseudo-arc flow {v}")));
    }
    let z = match z_target {
        Some(z) => {
            let req_like = nested_rates(h, xhat)?;
            // Each cumulative rate must cover the recursion's cumulative demand.
            for i in 0..h.node_count() {
                let levels = h.out_hyperarcs(i);
                let (mut have, mut need) = (0.0, 0.0);
                for &e in levels.iter().rev() {
                    have += z[e];
                    need += req_like[e];
                    if have < need - 1e-9 * need.max(1.0) {
                        return Err(Error::Infeasible("rates do not cover the pseudo-arc flows".into()));
                    }
                }
            }
            z.clone()
        }
        None => nested_rates(h, xhat)?,
    };
    let mut x = HyperFlowSet::zeros(&xhat.sinks, h);
    for i in 0..h.node_count() {
        let levels = h.out_hyperarcs(i);
        let mut mine: Vec<usize> = (0..pseudo.len()).filter(|&a| pseudo[a].tail == i).collect();
        mine.sort_by(|&a, &b| pseudo[b].level.cmp(&pseudo[a].level).then(pseudo[a].head.cmp(&pseudo[b].head)));
        for k in 0..xhat.sinks.len() {
            let mut room: Vec<f64> = levels.iter().map(|&e| z[e]).collect();
            for &a in &mine {
                let pa = pseudo[a];
                let mut left = xhat.flows[k][a].max(0.0);
                for m in (pa.level..=levels.len()).rev() {
                    if left <= 0.0 {
                        break;
                    }
                    let take = left.min(room[m - 1].max(0.0));
                    if take > 0.0 {
                        let e = levels[m - 1];
                        let p = h.hyperarc(e).heads.binary_search(&pa.head).expect("nested");
                        x.flows[k][e][p] += take;
                        room[m - 1] -= take;
                        left -= take;
                    }
                }
                // Round-off remainder goes to the outermost level.
                if left > 0.0 {
                    if left > 1e-9 * xhat.flows[k][a].max(1.0) {
                        return Err(Error::Infeasible("pseudo-arc flow exceeds nested rates".into()));
                    }
                    let e = levels[levels.len() - 1];
                    let p = h.hyperarc(e).heads.binary_search(&pa.head).expect("nested");
                    x.flows[k][e][p] += left;
                }
            }
        }
    }
    Ok((x, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Node 0 with rings {1} at cost 4 and {1, 2} at cost 9.
    fn two_level() -> Hypernetwork {
        let mut h = Hypernetwork::with_nodes(3);
        h.add_hyperarc(0, &[1], 4.0).unwrap();
        h.add_hyperarc(0, &[1, 2], 9.0).unwrap();
        h
    }

    #[test]
    fn dual_cost_increments() {
        let h = two_level();
        assert_eq!(wireless_dual_costs(&h).unwrap(), vec![4.0, 5.0]);
        let mut single = Hypernetwork::with_nodes(2);
        single.add_hyperarc(0, &[1], 3.0).unwrap();
        assert_eq!(wireless_dual_costs(&single).unwrap(), vec![3.0]);
    }

    #[test]
    fn two_level_recursion_by_hand() {
        let h = two_level();
        // Pseudo-arcs: (0,1) level 1, (0,2) level 2. Send 0.7 to node 1 and
        // 0.4 to node 2: z_2 = 0.4, z_1 = 1.1 - 0.4 = 0.7.
        let xhat = FlowSet { sinks: vec![2], flows: vec![vec![0.7, 0.4]] };
        let (x, z) = expand_from_hat(&h, &xhat, None).unwrap();
        assert!((z[0] - 0.7).abs() < 1e-15 && (z[1] - 0.4).abs() < 1e-15);
        assert_eq!(x.flows[0][1], vec![0.0, 0.4]);
        assert_eq!(x.flows[0][0], vec![0.7]);
        assert_eq!(reduce_to_hat(&h, &x).unwrap(), xhat);
    }

    #[test]
    fn zero_flows() {
        let h = two_level();
        let xhat = FlowSet::zeros(&[2], 2);
        let (x, z) = expand_from_hat(&h, &xhat, None).unwrap();
        assert_eq!(z.rates(), &[0.0, 0.0]);
        assert_eq!(reduce_to_hat(&h, &x).unwrap(), xhat);
    }

    #[test]
    fn single_level_reduction_is_identity() {
        let mut h = Hypernetwork::with_nodes(3);
        h.add_hyperarc(0, &[1, 2], 1.0).unwrap();
        let mut x = HyperFlowSet::zeros(&[2], &h);
        x.flows[0][0] = vec![0.25, 0.75];
        assert_eq!(reduce_to_hat(&h, &x).unwrap().flows[0], vec![0.25, 0.75]);
    }

    #[test]
    fn rejects_short_rates() {
        let h = two_level();
        let xhat = FlowSet { sinks: vec![2], flows: vec![vec![0.7, 0.4]] };
        let low = Subgraph::new(vec![0.5, 0.4]).unwrap();
        assert!(expand_from_hat(&h, &xhat, Some(&low)).is_err());
    }
}
