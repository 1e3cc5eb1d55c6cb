use crate::netmodel::{Hypernetwork, MulticastRequest, Subgraph};
use crate::{Error, Result};

/// Transmit power assignment of a routed wireless multicast.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerAssignment {
    /// Per node, the number of nested levels used (0 = silent).
    pub levels: Vec<usize>,
    /// Unit indicator on the chosen hyperarc of each transmitting node,
    /// scaled to the request rate.
    pub z: Subgraph,
    pub cost: f64,
}

fn level_cost(h: &Hypernetwork, i: usize, level: usize) -> f64 {
    match level {
        0 => 0.0,
        m => h.hyperarc(h.out_hyperarcs(i)[m - 1]).cost,
    }
}

fn covered(h: &Hypernetwork, levels: &[usize], source: usize) -> Vec<bool> {
    let mut seen = vec![false; h.node_count()];
    seen[source] = true;
    let mut stack = vec![source];
    while let Some(u) = stack.pop() {
        if levels[u] == 0 {
            continue;
        }
        for &v in &h.hyperarc(h.out_hyperarcs(u)[levels[u] - 1]).heads {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn assignment(h: &Hypernetwork, levels: Vec<usize>, rate: f64) -> PowerAssignment {
    let mut z = vec![0.0; h.hyperarc_count()];
    let mut cost = 0.0;
    for (i, &m) in levels.iter().enumerate() {
        if m > 0 {
            z[h.out_hyperarcs(i)[m - 1]] = rate;
            cost += rate * level_cost(h, i, m);
        }
    }
    PowerAssignment { levels, z: Subgraph::from_clamped(z), cost }
}

/// Multicast incremental power: grow a tree from the source by the
/// cheapest power increment that reaches a new node, counting every node
/// inside the raised range, until all sinks are covered. Transmissions
/// that serve no sink are pruned, then a sweep lowers any node whose
/// power can drop without disconnecting a sink.
pub fn mip_heuristic(h: &Hypernetwork, req: &MulticastRequest) -> Result<PowerAssignment> {
    h.check_nested()?;
    let n = h.node_count();
    let s = req.source;
    let mut levels = vec![0usize; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut inside = vec![false; n];
    inside[s] = true;
    while req.sinks.iter().any(|&t| !inside[t]) {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| inside[i]) {
            let base = level_cost(h, i, levels[i]);
            for (m, &e) in h.out_hyperarcs(i).iter().enumerate().skip(levels[i]) {
                if h.hyperarc(e).heads.iter().any(|&j| !inside[j]) {
                    let inc = h.hyperarc(e).cost - base;
                    if best.is_none_or(|(b, _, _)| inc < b - 1e-12) {
                        best = Some((inc, i, m + 1));
                    }
                    break;
                }
            }
        }
        let Some((_, i, m)) = best else {
            let t = req.sinks.iter().copied().find(|&t| !inside[t]).unwrap_or(s);
            return Err(Error::Unreachable { from: s, target: t });
        };
        levels[i] = m;
        for &j in &h.hyperarc(h.out_hyperarcs(i)[m - 1]).heads {
            if !inside[j] {
                inside[j] = true;
                parent[j] = Some(i);
            }
        }
    }

    // Prune: each transmitter only needs to reach children that lead to a sink.
    let mut needed = vec![false; n];
    for &t in &req.sinks {
        let mut x = t;
        while !needed[x] {
            needed[x] = true;
            match parent[x] {
                Some(p) => x = p,
                None => break,
            }
        }
    }
    let mut pruned = vec![0usize; n];
    for j in (0..n).filter(|&j| needed[j]) {
        if let Some(i) = parent[j] {
            let m = h
                .out_hyperarcs(i)
                .iter()
                .position(|&e| h.hyperarc(e).heads.contains(&j))
                .expect("child inside a range")
                + 1;
            pruned[i] = pruned[i].max(m);
        }
    }

    // Sweep: lower levels while every sink stays reachable.
    let serves = |lv: &[usize]| {
        let c = covered(h, lv, s);
        req.sinks.iter().all(|&t| c[t])
    };
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for m in 0..pruned[i] {
                let mut trial = pruned.clone();
                trial[i] = m;
                if serves(&trial) {
                    pruned = trial;
                    changed = true;
                    break;
                }
            }
        }
    }
    Ok(assignment(h, pruned, req.rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Source 0 on a line 0 - 1 - 2 with unit spacing and squared-distance costs.
    fn line() -> Hypernetwork {
        let mut h = Hypernetwork::with_nodes(3);
        h.add_hyperarc(0, &[1], 1.0).unwrap();
        h.add_hyperarc(0, &[1, 2], 4.0).unwrap();
        h.add_hyperarc(1, &[0, 2], 1.0).unwrap();
        h.add_hyperarc(2, &[1], 1.0).unwrap();
        h.add_hyperarc(2, &[0, 1], 4.0).unwrap();
        h
    }

    #[test]
    fn relays_when_cheaper() {
        let h = line();
        let req = MulticastRequest::new(3, 0, &[2], 1.0).unwrap();
        let p = mip_heuristic(&h, &req).unwrap();
        assert_eq!(p.levels, vec![1, 1, 0]);
        assert_eq!(p.cost, 2.0);
    }

    #[test]
    fn prunes_unused_relays() {
        let h = line();
        let req = MulticastRequest::new(3, 0, &[1], 1.0).unwrap();
        let p = mip_heuristic(&h, &req).unwrap();
        assert_eq!(p.levels, vec![1, 0, 0]);
        assert_eq!(p.cost, 1.0);
    }

    #[test]
    fn disconnected_sink_is_an_error() {
        let mut h = Hypernetwork::with_nodes(3);
        h.add_hyperarc(0, &[1], 1.0).unwrap();
        let req = MulticastRequest::new(3, 0, &[2], 1.0).unwrap();
        assert!(mip_heuristic(&h, &req).is_err());
    }
}
