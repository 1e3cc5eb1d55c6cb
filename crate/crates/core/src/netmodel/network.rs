use std::collections::HashMap;

use crate::{Error, Result};

/// A directed link with a linear cost per unit rate and a capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    /// Cost per unit rate, `a_ij >= 0`.
    pub cost: f64,
    /// Capacity `c_ij > 0`; `f64::INFINITY` for uncapacitated arcs.
    pub capacity: f64,
}

/// Wireline network: a directed graph without self-loops or parallel arcs.
///
/// Nodes carry string identifiers; algorithms work on dense indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Network {
    names: Vec<String>,
    index: HashMap<String, usize>,
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Network {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut net = Network::default();
        for name in names {
            net.add_node(name)?;
        }
        Ok(net)
    }

    /// Network on nodes named `0..count`.
    pub fn with_nodes(count: usize) -> Self {
        Network::new((0..count).map(|i| i.to_string())).expect("distinct names")
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::InvalidNetwork(format!("duplicate node `{name}`")));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        Ok(id)
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, cost: f64, capacity: f64) -> Result<usize> {
        let n = self.node_count();
        if tail >= n || head >= n {
            return Err(Error::UnknownNode(format!("{}", tail.max(head))));
        }
        if tail == head {
            return Err(Error::InvalidNetwork(format!("self-loop at `{}`", self.names[tail])));
        }
        if !(cost >= 0.0) || !cost.is_finite() {
            return Err(Error::InvalidNetwork(format!(
                "arc ({}, {}) has invalid cost {cost}",
                self.names[tail], self.names[head]
            )));
        }
        if !(capacity > 0.0) {
            return Err(Error::InvalidNetwork(format!(
                "arc ({}, {}) has non-positive capacity {capacity}",
                self.names[tail], self.names[head]
            )));
        }
        if self.find_arc(tail, head).is_some() {
            return Err(Error::InvalidNetwork(format!(
                "duplicate arc ({}, {})",
                self.names[tail], self.names[head]
            )));
        }
        let id = self.arcs.len();
        self.arcs.push(Arc { tail, head, cost, capacity });
        self.out[tail].push(id);
        self.inc[head].push(id);
        Ok(id)
    }

    /// Add an arc between named nodes.
    pub fn connect(&mut self, tail: &str, head: &str, cost: f64, capacity: f64) -> Result<usize> {
        let t = self.require(tail)?;
        let h = self.require(head)?;
        self.add_arc(t, h, cost, capacity)
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

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, e: usize) -> &Arc {
        &self.arcs[e]
    }

    pub fn out_arcs(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn in_arcs(&self, i: usize) -> &[usize] {
        &self.inc[i]
    }

    pub fn find_arc(&self, tail: usize, head: usize) -> Option<usize> {
        self.out
            .get(tail)?
            .iter()
            .copied()
            .find(|&e| self.arcs[e].head == head)
    }

    pub fn costs(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.cost).collect()
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.capacity).collect()
    }

    /// Same topology with every capacity removed.
    pub fn uncapacitated(&self) -> Network {
        let mut net = self.clone();
        for a in &mut net.arcs {
            a.capacity = f64::INFINITY;
        }
        net
    }

    /// Same topology and capacities with the given per-arc costs.
    pub fn with_costs(&self, costs: &[f64]) -> Result<Network> {
        if costs.len() != self.arc_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} costs, got {}",
                self.arc_count(),
                costs.len()
            )));
        }
        let mut net = self.clone();
        for (a, &c) in net.arcs.iter_mut().zip(costs) {
            if !(c >= 0.0) {
                return Err(Error::InvalidNetwork(format!("negative cost {c}")));
            }
            a.cost = c;
        }
        Ok(net)
    }

    /// The seven-node butterfly network with costs reproducing a coded
    /// optimum of 19/2 and a Steiner tree optimum of 10 for a unit-rate
    /// multicast from `s` to `{t1, t2}`.
    pub fn butterfly() -> Network {
        let mut net = Network::new(["s", "a", "b", "c", "d", "t1", "t2"]).unwrap();
        for (t, h, c) in [
            ("s", "a", 2.0),
            ("s", "b", 2.0),
            ("a", "c", 1.0),
            ("b", "c", 1.0),
            ("c", "d", 1.0),
            ("a", "t1", 3.0),
            ("b", "t2", 3.0),
            ("d", "t1", 3.0),
            ("d", "t2", 3.0),
        ] {
            net.connect(t, h, c, 1.0).unwrap();
        }
        net
    }

    /// The four-node diamond 1 -> {2, 3} -> 4 with unit costs; arcs are
    /// ordered (1,2), (1,3), (2,4), (3,4).
    pub fn diamond() -> Network {
        let mut net = Network::new(["1", "2", "3", "4"]).unwrap();
        for (t, h) in [("1", "2"), ("1", "3"), ("2", "4"), ("3", "4")] {
            net.connect(t, h, 1.0, f64::INFINITY).unwrap();
        }
        net
    }
}
