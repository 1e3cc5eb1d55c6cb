use crate::flowcore::dijkstra;
use crate::netmodel::{Network, Subgraph};
use crate::{Error, Result};

/// A routed arborescence rooted at the source.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutedTree {
    /// Arc ids, sorted.
    pub arcs: Vec<usize>,
    pub cost: f64,
}

impl RoutedTree {
    /// Unit-rate indicator subgraph scaled to `rate`.
    pub fn subgraph(&self, arc_count: usize, rate: f64) -> Subgraph {
        let mut z = vec![0.0; arc_count];
        for &e in &self.arcs {
            z[e] = rate;
        }
        Subgraph::from_clamped(z)
    }

    /// Every node of `targets` is reachable from `root` and no node has two
    /// tree arcs entering it.
    pub fn is_arborescence(&self, net: &Network, root: usize, targets: &[usize]) -> bool {
        let mut indeg = vec![0usize; net.node_count()];
        for &e in &self.arcs {
            indeg[net.arc(e).head] += 1;
        }
        if indeg[root] > 0 || indeg.iter().any(|&d| d > 1) {
            return false;
        }
        let reach = reachable(net, &self.arcs, root);
        targets.iter().all(|&t| reach[t]) && self.arcs.iter().all(|&e| reach[net.arc(e).tail])
    }
}

fn reachable(net: &Network, arcs: &[usize], root: usize) -> Vec<bool> {
    let mut used = vec![false; net.arc_count()];
    for &e in arcs {
        used[e] = true;
    }
    let mut seen = vec![false; net.node_count()];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &e in net.out_arcs(u) {
            let v = net.arc(e).head;
            if used[e] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// All-pairs shortest distances and predecessor arcs over arc costs.
struct Closure {
    dist: Vec<Vec<f64>>,
    pred: Vec<Vec<Option<usize>>>,
}

impl Closure {
    fn new(net: &Network) -> Self {
        let w = net.costs();
        let (dist, pred) = (0..net.node_count()).map(|s| dijkstra(net, &w, s, false)).unzip();
        Closure { dist, pred }
    }

    fn path(&self, net: &Network, u: usize, v: usize, out: &mut Vec<usize>) {
        let mut x = v;
        while x != u {
            let e = self.pred[u][x].expect("reachable");
            out.push(e);
            x = net.arc(e).tail;
        }
    }
}

/// Tree in the metric closure as a set of closure edges with their cost.
#[derive(Clone, Default)]
struct ClosureTree {
    edges: Vec<(usize, usize)>,
    cost: f64,
    covered: Vec<usize>,
}

impl ClosureTree {
    fn extend(&mut self, other: ClosureTree) {
        self.edges.extend(other.edges);
        self.cost += other.cost;
        self.covered.extend(other.covered);
    }
}

/// Recursive greedy of level `level` covering `k` terminals of `x` from `r`.
fn greedy(c: &Closure, level: usize, k: usize, r: usize, x: &[usize]) -> ClosureTree {
    if level <= 1 {
        let mut near: Vec<usize> = x.iter().copied().filter(|&t| c.dist[r][t].is_finite()).collect();
        near.sort_by(|&a, &b| c.dist[r][a].total_cmp(&c.dist[r][b]).then(a.cmp(&b)));
        near.truncate(k);
        return ClosureTree {
            edges: near.iter().map(|&t| (r, t)).collect(),
            cost: near.iter().map(|&t| c.dist[r][t]).sum(),
            covered: near,
        };
    }
    let mut tree = ClosureTree::default();
    let mut left: Vec<usize> = x.to_vec();
    let mut k = k;
    while k > 0 {
        let mut best: Option<(f64, ClosureTree)> = None;
        for v in 0..c.dist.len() {
            let d = c.dist[r][v];
            if !d.is_finite() {
                continue;
            }
            for kk in 1..=k {
                let mut sub = greedy(c, level - 1, kk, v, &left);
                if sub.covered.is_empty() {
                    break;
                }
                if v != r {
                    sub.edges.push((r, v));
                    sub.cost += d;
                }
                let density = sub.cost / sub.covered.len() as f64;
                if best.as_ref().is_none_or(|(b, _)| density < b - 1e-12) {
                    best = Some((density, sub));
                }
            }
        }
        let Some((_, sub)) = best else { break };
        k = k.saturating_sub(sub.covered.len());
        left.retain(|t| !sub.covered.contains(t));
        tree.extend(sub);
    }
    tree
}

/// Directed Steiner tree by the level-`level` recursive greedy on the
/// metric closure, expanded to network arcs and pruned to an arborescence.
/// `level = 1` joins shortest paths; a single sink gives a shortest path.
pub fn dst_approx(net: &Network, source: usize, sinks: &[usize], level: usize) -> Result<RoutedTree> {
    if level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    let n = net.node_count();
    if source >= n {
        return Err(Error::UnknownNode(source.to_string()));
    }
    let c = Closure::new(net);
    for &t in sinks {
        if t >= n {
            return Err(Error::UnknownNode(t.to_string()));
        }
        if !c.dist[source][t].is_finite() {
            return Err(Error::Unreachable { from: source, target: t });
        }
    }
    let terms: Vec<usize> = sinks.iter().copied().filter(|&t| t != source).collect();
    let tree = greedy(&c, level, terms.len(), source, &terms);
    let mut arcs = Vec::new();
    for &(u, v) in &tree.edges {
        c.path(net, u, v, &mut arcs);
    }
    arcs.sort_unstable();
    arcs.dedup();
    Ok(prune(net, &arcs, source, &terms))
}

/// Shortest-path arborescence inside `arcs`, keeping only branches that
/// lead to a target.
fn prune(net: &Network, arcs: &[usize], root: usize, targets: &[usize]) -> RoutedTree {
    let mut w = vec![f64::INFINITY; net.arc_count()];
    for &e in arcs {
        w[e] = net.arc(e).cost;
    }
    let (_, pred) = dijkstra(net, &w, root, false);
    let mut keep = Vec::new();
    for &t in targets {
        let mut x = t;
        while let Some(e) = pred[x] {
            if keep.contains(&e) {
                break;
            }
            keep.push(e);
            x = net.arc(e).tail;
        }
    }
    keep.sort_unstable();
    let cost = keep.iter().map(|&e| net.arc(e).cost).sum();
    RoutedTree { arcs: keep, cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn butterfly_tree_costs_ten() {
        let net = Network::butterfly();
        for level in 1..=3 {
            let t = dst_approx(&net, 0, &[5, 6], level).unwrap();
            assert_eq!(t.cost, 10.0);
            assert!(t.is_arborescence(&net, 0, &[5, 6]));
        }
    }

    #[test]
    fn single_sink_is_a_shortest_path() {
        let net = Network::butterfly();
        let t = dst_approx(&net, 0, &[5], 2).unwrap();
        assert_eq!(t.cost, 5.0);
        assert_eq!(t.arcs.len(), 2);
    }

    #[test]
    fn unreachable_sink_is_an_error() {
        let mut net = Network::with_nodes(3);
        net.add_arc(0, 1, 1.0, 1.0).unwrap();
        assert!(matches!(dst_approx(&net, 0, &[2], 2), Err(Error::Unreachable { target: 2, .. })));
    }

    #[test]
    fn level_two_beats_level_one_on_a_shared_trunk() {
        // Two sinks behind a long shared trunk; direct arcs cost slightly less
        // than the trunk each, so joining shortest paths pays twice.
        let mut net = Network::with_nodes(4);
        net.add_arc(0, 1, 5.0, 1.0).unwrap();
        net.add_arc(1, 2, 1.0, 1.0).unwrap();
        net.add_arc(1, 3, 1.0, 1.0).unwrap();
        net.add_arc(0, 2, 5.5, 1.0).unwrap();
        net.add_arc(0, 3, 5.5, 1.0).unwrap();
        assert_eq!(dst_approx(&net, 0, &[2, 3], 1).unwrap().cost, 11.0);
        assert_eq!(dst_approx(&net, 0, &[2, 3], 2).unwrap().cost, 7.0);
    }
}
