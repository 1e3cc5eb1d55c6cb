use std::collections::HashMap;

use super::Network;
use crate::{Error, Result};

/// A broadcast link from `tail` reaching every node of `heads`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperarc {
    pub tail: usize,
    /// End nodes, sorted and distinct.
    pub heads: Vec<usize>,
    /// Cost per unit injection rate.
    pub cost: f64,
}

/// Per-receiver reception probabilities `p_ij` for lossy hyperarcs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReceptionMap(HashMap<(usize, usize), f64>);

impl ReceptionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, tail: usize, head: usize, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidNetwork(format!("reception probability {p} outside [0, 1]")));
        }
        self.0.insert((tail, head), p);
        Ok(())
    }

    /// Missing pairs are treated as never receiving.
    pub fn get(&self, tail: usize, head: usize) -> f64 {
        self.0.get(&(tail, head)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries sorted by `(tail, head)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut v: Vec<_> = self.0.iter().map(|(&(i, j), &p)| (i, j, p)).collect();
        v.sort_by_key(|&(i, j, _)| (i, j));
        v
    }
}

/// An element of `A'`: node `head` is first reached from `tail` by the
/// `level`-th (1-based) hyperarc of `tail`'s nested sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PseudoArc {
    pub tail: usize,
    pub head: usize,
    pub level: usize,
}

/// Wireless network of broadcast hyperarcs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hypernetwork {
    names: Vec<String>,
    index: HashMap<String, usize>,
    hyperarcs: Vec<Hyperarc>,
    out: Vec<Vec<usize>>,
    reception: Option<ReceptionMap>,
    positions: Option<Vec<(f64, f64)>>,
}

impl Hypernetwork {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut h = Hypernetwork::default();
        for name in names {
            let name = name.into();
            if h.index.contains_key(&name) {
                return Err(Error::InvalidNetwork(format!("duplicate node `{name}`")));
            }
            h.index.insert(name.clone(), h.names.len());
            h.names.push(name);
            h.out.push(Vec::new());
        }
        Ok(h)
    }

    pub fn with_nodes(count: usize) -> Self {
        Hypernetwork::new((0..count).map(|i| i.to_string())).expect("distinct names")
    }

    /// Each wireline arc becomes a singleton hyperarc of the same cost.
    pub fn from_wireline(net: &Network) -> Self {
        let mut h = Hypernetwork::new(net.names().iter().cloned()).expect("distinct names");
        for a in net.arcs() {
            h.add_hyperarc(a.tail, &[a.head], a.cost).expect("valid arc");
        }
        h
    }

    /// Add a hyperarc. An existing hyperarc with the same end-node set is
    /// merged, keeping the smaller cost. Returns the hyperarc id.
    pub fn add_hyperarc(&mut self, tail: usize, heads: &[usize], cost: f64) -> Result<usize> {
        let n = self.node_count();
        if tail >= n {
            return Err(Error::UnknownNode(tail.to_string()));
        }
        let mut heads = heads.to_vec();
        heads.sort_unstable();
        heads.dedup();
        if heads.is_empty() {
            return Err(Error::InvalidNetwork(format!("hyperarc from `{}` has no end nodes", self.names[tail])));
        }
        if let Some(&j) = heads.iter().find(|&&j| j >= n) {
            return Err(Error::UnknownNode(j.to_string()));
        }
        if heads.binary_search(&tail).is_ok() {
            return Err(Error::InvalidNetwork(format!("hyperarc from `{}` reaches itself", self.names[tail])));
        }
        if !(cost >= 0.0) || !cost.is_finite() {
            return Err(Error::InvalidNetwork(format!("hyperarc cost {cost} is invalid")));
        }
        if let Some(&e) = self.out[tail].iter().find(|&&e| self.hyperarcs[e].heads == heads) {
            let h = &mut self.hyperarcs[e];
            h.cost = h.cost.min(cost);
            return Ok(e);
        }
        let id = self.hyperarcs.len();
        self.hyperarcs.push(Hyperarc { tail, heads, cost });
        // Keep each node's list ordered by reach so nested sequences read J_1, J_2, ...
        let hs = &self.hyperarcs;
        let pos = self.out[tail]
            .iter()
            .position(|&e| (hs[e].heads.len(), hs[e].cost) > (hs[id].heads.len(), hs[id].cost))
            .unwrap_or(self.out[tail].len());
        self.out[tail].insert(pos, id);
        Ok(id)
    }

    pub fn set_reception(&mut self, map: ReceptionMap) {
        self.reception = Some(map);
    }

    pub fn set_positions(&mut self, positions: Vec<(f64, f64)>) -> Result<()> {
        if positions.len() != self.node_count() {
            return Err(Error::InvalidNetwork("one position per node required".into()));
        }
        self.positions = Some(positions);
        Ok(())
    }

    pub fn reception(&self) -> Option<&ReceptionMap> {
        self.reception.as_ref()
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    pub fn is_lossy(&self) -> bool {
        self.reception.is_some()
    }

    /// `p_ij`; 1 for every end node when the network is lossless.
    pub fn reception_prob(&self, tail: usize, head: usize) -> f64 {
        match &self.reception {
            Some(m) => m.get(tail, head),
            None => 1.0,
        }
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.node(name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn hyperarc_count(&self) -> usize {
        self.hyperarcs.len()
    }

    pub fn hyperarcs(&self) -> &[Hyperarc] {
        &self.hyperarcs
    }

    pub fn hyperarc(&self, e: usize) -> &Hyperarc {
        &self.hyperarcs[e]
    }

    /// Hyperarcs leaving `i`, ordered by increasing reach.
    pub fn out_hyperarcs(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn costs(&self) -> Vec<f64> {
        self.hyperarcs.iter().map(|h| h.cost).collect()
    }

    /// Total number of (hyperarc, end node) pairs.
    pub fn incidence_count(&self) -> usize {
        self.hyperarcs.iter().map(|h| h.heads.len()).sum()
    }

    /// Check that every node's hyperarcs form a strictly increasing chain
    /// of end-node sets with strictly increasing costs.
    pub fn check_nested(&self) -> Result<()> {
        for i in 0..self.node_count() {
            for w in self.out[i].windows(2) {
                let (a, b) = (&self.hyperarcs[w[0]], &self.hyperarcs[w[1]]);
                let subset = a.heads.len() < b.heads.len()
                    && a.heads.iter().all(|j| b.heads.binary_search(j).is_ok());
                if !subset {
                    return Err(Error::InvalidNetwork(format!(
                        "hyperarcs of `{}` are not nested",
                        self.names[i]
                    )));
                }
                if !(a.cost < b.cost) {
                    return Err(Error::InvalidNetwork(format!(
                        "hyperarc costs of `{}` are not strictly increasing",
                        self.names[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_nested(&self) -> bool {
        self.check_nested().is_ok()
    }

    /// The pseudo-arcs `A'` of a nested network, grouped by tail and
    /// ordered by `(level, head)` within each tail.
    pub fn pseudo_arcs(&self) -> Result<Vec<PseudoArc>> {
        self.check_nested()?;
        let mut out = Vec::new();
        for i in 0..self.node_count() {
            let mut seen: Vec<usize> = Vec::new();
            for (m, &e) in self.out[i].iter().enumerate() {
                for &j in &self.hyperarcs[e].heads {
                    if !seen.contains(&j) {
                        seen.push(j);
                        out.push(PseudoArc { tail: i, head: j, level: m + 1 });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Wireline view of a nested network: one arc per pseudo-arc with cost
    /// `a_{iJ_m(i,j)}` and infinite capacity. Arc ids match
    /// [`Hypernetwork::pseudo_arcs`].
    pub fn pseudo_network(&self) -> Result<(Network, Vec<PseudoArc>)> {
        let arcs = self.pseudo_arcs()?;
        let mut net = Network::new(self.names.iter().cloned())?;
        for pa in &arcs {
            let e = self.out[pa.tail][pa.level - 1];
            net.add_arc(pa.tail, pa.head, self.hyperarcs[e].cost, f64::INFINITY)?;
        }
        Ok((net, arcs))
    }
}
