use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Hypernetwork, Network, ReceptionMap};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkModel {
    /// Nested power levels per node, cost `d_max(J)^exponent`.
    Lossless,
    /// One unit-cost broadcast per node with `p_ij = exp(-beta d^2)`.
    Lossy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometricParams {
    pub count: usize,
    pub side: f64,
    pub radius: f64,
    /// Scale the square so that there is one node per unit area.
    pub unit_density: bool,
    pub link: LinkModel,
    pub exponent: f64,
    pub beta: f64,
    /// Lossy mode keeps at most this many most reliable receivers per node.
    pub max_fanout: usize,
    /// Lossy mode drops receivers below this probability.
    pub min_prob: f64,
    pub seed: u64,
}

impl Default for GeometricParams {
    fn default() -> Self {
        GeometricParams {
            count: 20,
            side: 10.0,
            radius: 3.0,
            unit_density: false,
            link: LinkModel::Lossless,
            exponent: 2.0,
            beta: 0.25,
            max_fanout: 6,
            min_prob: 0.01,
            seed: 0,
        }
    }
}

impl GeometricParams {
    pub fn lossless(count: usize, side: f64, radius: f64, seed: u64) -> Self {
        GeometricParams { count, side, radius, seed, ..Default::default() }
    }

    pub fn lossy(count: usize, radius: f64, seed: u64) -> Self {
        GeometricParams {
            count,
            radius,
            seed,
            unit_density: true,
            link: LinkModel::Lossy,
            ..Default::default()
        }
    }

    pub fn effective_side(&self) -> f64 {
        if self.unit_density {
            (self.count as f64).sqrt()
        } else {
            self.side
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidArgument("node count must be positive".into()));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {} must be positive", self.radius)));
        }
        if !(self.effective_side() > 0.0) {
            return Err(Error::InvalidArgument("side must be positive".into()));
        }
        if !(self.exponent > 0.0) || !(self.beta > 0.0) || self.max_fanout == 0 {
            return Err(Error::InvalidArgument("exponent, beta and fanout must be positive".into()));
        }
        Ok(())
    }
}

/// `count` i.i.d. uniform points in `[0, side]^2`.
pub fn place_uniform<R: Rng>(count: usize, side: f64, rng: &mut R) -> Vec<(f64, f64)> {
    (0..count).map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect()
}

/// Random geometric wireless network, deterministic in `params.seed`.
pub fn build_geometric_network(params: &GeometricParams) -> Result<Hypernetwork> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pos = place_uniform(params.count, params.effective_side(), &mut rng);
    build_from_positions(&pos, params)
}

/// Build the hyperarcs for fixed node positions.
pub fn build_from_positions(pos: &[(f64, f64)], params: &GeometricParams) -> Result<Hypernetwork> {
    if pos.is_empty() {
        return Err(Error::InvalidArgument("node count must be positive".into()));
    }
    params.validate()?;
    let n = pos.len();
    let mut h = Hypernetwork::with_nodes(n);
    let dist = |i: usize, j: usize| ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
    let mut reception = ReceptionMap::new();
    for i in 0..n {
        let mut near: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (dist(i, j), j))
            .filter(|&(d, _)| d <= params.radius)
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match params.link {
            LinkModel::Lossless => {
                let mut k = 0;
                while k < near.len() {
                    // Nodes at exactly the same distance share a power level.
                    let d = near[k].0;
                    while k < near.len() && near[k].0 == d {
                        k += 1;
                    }
                    let heads: Vec<usize> = near[..k].iter().map(|&(_, j)| j).collect();
                    h.add_hyperarc(i, &heads, d.powf(params.exponent))?;
                }
            }
            LinkModel::Lossy => {
                let heads: Vec<usize> = near
                    .iter()
                    .map(|&(d, j)| (j, (-params.beta * d * d).exp()))
                    .filter(|&(_, p)| p >= params.min_prob)
                    .take(params.max_fanout)
                    .map(|(j, p)| {
                        reception.set(i, j, p).expect("probability in range");
                        j
                    })
                    .collect();
                if !heads.is_empty() {
                    h.add_hyperarc(i, &heads, 1.0)?;
                }
            }
        }
    }
    if params.link == LinkModel::Lossy {
        h.set_reception(reception);
    }
    h.set_positions(pos.to_vec())?;
    Ok(h)
}

/// Random directed graph for wireline studies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WirelineParams {
    pub count: usize,
    /// Probability of each extra ordered pair becoming an arc.
    pub density: f64,
    /// Costs are uniform integers in `1..=max_cost`.
    pub max_cost: u32,
    /// Capacity of every arc; `None` for uncapacitated.
    pub capacity: Option<f64>,
    pub seed: u64,
}

impl Default for WirelineParams {
    fn default() -> Self {
        WirelineParams { count: 20, density: 0.15, max_cost: 10, capacity: None, seed: 0 }
    }
}

/// Random strongly connected directed graph: a ring through a random node
/// order plus each other ordered pair with probability `density`.
pub fn random_wireline(params: &WirelineParams) -> Result<Network> {
    if params.count < 2 || params.max_cost == 0 || !(0.0..=1.0).contains(&params.density) {
        return Err(Error::InvalidArgument(
            "need at least two nodes, a positive cost bound and a density in [0, 1]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.count;
    let cap = params.capacity.unwrap_or(f64::INFINITY);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut ring = vec![usize::MAX; n];
    for k in 0..n {
        ring[order[k]] = order[(k + 1) % n];
    }
    let mut net = Network::with_nodes(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && (ring[i] == j || rng.gen::<f64>() < params.density) {
                net.add_arc(i, j, rng.gen_range(1..=params.max_cost) as f64, cap)?;
            }
        }
    }
    Ok(net)
}
