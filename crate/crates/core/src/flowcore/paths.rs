use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::netmodel::Network;
use crate::{Error, Result};

/// A path as node and arc sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
    pub weight: f64,
}

impl Path {
    /// Unit flow along the path over `arc_count` arcs.
    pub fn unit_flow(&self, arc_count: usize) -> Vec<f64> {
        let mut f = vec![0.0; arc_count];
        for &e in &self.arcs {
            f[e] += 1.0;
        }
        f
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances from `s` (or to `s` when `reverse`). Arcs with
/// infinite or NaN weight are skipped. Returns distances and the arc
/// through which each node was settled.
pub fn dijkstra(net: &Network, weights: &[f64], s: usize, reverse: bool) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = net.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Item(0.0, s));
    while let Some(Item(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let arcs = if reverse { net.in_arcs(u) } else { net.out_arcs(u) };
        for &e in arcs {
            let w = weights[e];
            if !w.is_finite() {
                continue;
            }
            let a = net.arc(e);
            let v = if reverse { a.tail } else { a.head };
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(e);
                heap.push(Item(nd, v));
            }
        }
    }
    (dist, pred)
}

/// Minimum-weight `s`-`t` path; among equal-weight paths the one with the
/// lexicographically smallest node sequence.
pub fn shortest_path(net: &Network, weights: &[f64], s: usize, t: usize) -> Result<Path> {
    let n = net.node_count();
    if s >= n || t >= n {
        return Err(Error::UnknownNode(s.max(t).to_string()));
    }
    if weights.len() != net.arc_count() {
        return Err(Error::InvalidArgument("one weight per arc required".into()));
    }
    if let Some(w) = weights.iter().find(|w| **w < 0.0) {
        return Err(Error::InvalidArgument(format!("negative arc weight {w}")));
    }
    let (to_t, _) = dijkstra(net, weights, t, true);
    let total = to_t[s];
    if !total.is_finite() {
        return Err(Error::Unreachable { from: s, target: t });
    }
    let tol = 1e-12 * (1.0 + total);
    let mut nodes = vec![s];
    let mut arcs = Vec::new();
    let mut visited = vec![false; n];
    visited[s] = true;
    let mut u = s;
    while u != t {
        let next = net
            .out_arcs(u)
            .iter()
            .copied()
            .filter(|&e| {
                let v = net.arc(e).head;
                weights[e].is_finite() && !visited[v] && (weights[e] + to_t[v] - to_t[u]).abs() <= tol
            })
            .min_by_key(|&e| net.arc(e).head);
        match next {
            Some(e) => {
                u = net.arc(e).head;
                visited[u] = true;
                nodes.push(u);
                arcs.push(e);
            }
            None => return fallback(net, weights, s, t),
        }
    }
    let weight = arcs.iter().map(|&e| weights[e]).sum();
    Ok(Path { nodes, arcs, weight })
}

// Only reachable through zero-weight cycles that trap the greedy walk.
fn fallback(net: &Network, weights: &[f64], s: usize, t: usize) -> Result<Path> {
    let (_, pred) = dijkstra(net, weights, s, false);
    let mut arcs = Vec::new();
    let mut v = t;
    while v != s {
        let e = pred[v].ok_or(Error::Unreachable { from: s, target: t })?;
        arcs.push(e);
        v = net.arc(e).tail;
    }
    arcs.reverse();
    let mut nodes = vec![s];
    nodes.extend(arcs.iter().map(|&e| net.arc(e).head));
    let weight = arcs.iter().map(|&e| weights[e]).sum();
    Ok(Path { nodes, arcs, weight })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let mut net = Network::with_nodes(2);
        net.add_arc(0, 1, 3.0, 1.0).unwrap();
        let p = shortest_path(&net, &[3.0], 0, 1).unwrap();
        assert_eq!(p.arcs, vec![0]);
        assert_eq!(p.weight, 3.0);
    }

    #[test]
    fn butterfly_costs() {
        let net = Network::butterfly();
        let p = shortest_path(&net, &net.costs(), 0, 5).unwrap();
        assert_eq!(p.weight, 5.0);
        assert_eq!(p.nodes, vec![0, 1, 5]);
    }

    #[test]
    fn uniform_weights_minimise_hops() {
        let net = Network::butterfly();
        let p = shortest_path(&net, &[1.0; 9], 0, 6).unwrap();
        assert_eq!(p.nodes, vec![0, 2, 6]);
    }

    #[test]
    fn lexicographic_ties() {
        // 0 -> {2, 1} -> 3 with equal weights: prefer the path through 1.
        let mut net = Network::with_nodes(4);
        for (u, v) in [(0, 2), (0, 1), (2, 3), (1, 3)] {
            net.add_arc(u, v, 1.0, 1.0).unwrap();
        }
        let p = shortest_path(&net, &[1.0; 4], 0, 3).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 3]);
    }

    #[test]
    fn unreachable() {
        let net = Network::with_nodes(2);
        assert!(matches!(shortest_path(&net, &[], 0, 1), Err(Error::Unreachable { .. })));
    }
}
