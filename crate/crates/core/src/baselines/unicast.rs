use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::flowcore::shortest_path;
use crate::netmodel::{Hypernetwork, MulticastRequest, Network};
use crate::wireless::solve_lossy;
use crate::{Error, Result};

/// Reliable unicast schemes over lossy links, from the most to the least
/// transmission-hungry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnicastStrategy {
    /// The sink acknowledges over the reverse path; the source resends on a
    /// missing acknowledgement.
    EndToEndRetransmission,
    /// Rateless erasure code between source and sink; relays forward.
    EndToEndCoding,
    /// Per-link acknowledgement and resend.
    LinkByLinkRetransmission,
    /// Every relay recodes, so each link costs `1/p`.
    PathCoding,
    /// Coded subgraph over broadcast links, no fixed path.
    FullCoding,
}

impl UnicastStrategy {
    pub const ALL: [UnicastStrategy; 5] = [
        UnicastStrategy::EndToEndRetransmission,
        UnicastStrategy::EndToEndCoding,
        UnicastStrategy::LinkByLinkRetransmission,
        UnicastStrategy::PathCoding,
        UnicastStrategy::FullCoding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnicastStrategy::EndToEndRetransmission => "end_to_end_retransmission",
            UnicastStrategy::EndToEndCoding => "end_to_end_coding",
            UnicastStrategy::LinkByLinkRetransmission => "link_by_link_retransmission",
            UnicastStrategy::PathCoding => "path_coding",
            UnicastStrategy::FullCoding => "full_coding",
        }
    }
}

/// Whether acknowledgements can be lost like data packets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AckModel {
    #[default]
    Lossy,
    Perfect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UnicastConfig {
    /// Monte Carlo packets per estimate.
    pub packets: usize,
    pub seed: u64,
    pub acks: AckModel,
}

impl Default for UnicastConfig {
    fn default() -> Self {
        UnicastConfig { packets: 2000, seed: 0, acks: AckModel::Lossy }
    }
}

/// Expected data transmissions per delivered packet. Acknowledgements are
/// not counted.
#[derive(Clone, Debug, PartialEq)]
pub struct UnicastEstimate {
    pub strategy: UnicastStrategy,
    pub mean: f64,
    /// Monte Carlo standard error; zero for exact values.
    pub stderr: f64,
    /// Node sequence of the chosen path, if the scheme uses one.
    pub path: Option<Vec<usize>>,
}

/// Point-to-point view of a lossy network: one arc per receiver with
/// positive reception probability.
fn link_view(h: &Hypernetwork) -> Result<(Network, Vec<f64>)> {
    let map = h
        .reception()
        .ok_or_else(|| Error::InvalidNetwork("unicast strategies need reception probabilities".into()))?;
    let mut net = Network::with_nodes(h.node_count());
    let mut probs = Vec::new();
    for (i, j, p) in map.entries() {
        if p > 0.0 {
            net.add_arc(i, j, 1.0, f64::INFINITY)?;
            probs.push(p);
        }
    }
    Ok((net, probs))
}

/// Closed-form expected data transmissions along a path with per-link
/// reception probabilities `probs`. `None` for full coding.
pub fn path_expectation(strategy: UnicastStrategy, probs: &[f64], acks: AckModel) -> Option<f64> {
    let ack = |p: f64| if acks == AckModel::Lossy { p } else { 1.0 };
    let through: f64 = probs.iter().product();
    // Transmissions of one source attempt: node k sends iff the packet reached it.
    let attempt: f64 = (0..probs.len()).map(|k| probs[..k].iter().product::<f64>()).sum();
    match strategy {
        UnicastStrategy::EndToEndRetransmission => Some(attempt / (through * ack(through))),
        UnicastStrategy::EndToEndCoding => Some(attempt / through),
        UnicastStrategy::LinkByLinkRetransmission => Some(probs.iter().map(|&p| 1.0 / (p * ack(p))).sum()),
        UnicastStrategy::PathCoding => Some(probs.iter().map(|&p| 1.0 / p).sum()),
        UnicastStrategy::FullCoding => None,
    }
}

fn path_weights(strategy: UnicastStrategy, probs: &[f64], acks: AckModel) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| match strategy {
            // These schemes pick the path minimising source transmissions.
            UnicastStrategy::EndToEndRetransmission | UnicastStrategy::EndToEndCoding => -p.ln(),
            UnicastStrategy::LinkByLinkRetransmission if acks == AckModel::Lossy => 1.0 / (p * p),
            _ => 1.0 / p,
        })
        .collect()
}

/// Data transmissions to deliver one packet.
fn simulate_packet(strategy: UnicastStrategy, probs: &[f64], acks: AckModel, rng: &mut ChaCha8Rng) -> u64 {
    let lossy = acks == AckModel::Lossy;
    let mut tx = 0u64;
    // One source attempt forwarded hop by hop; true if it reached the sink.
    let attempt = |rng: &mut ChaCha8Rng, tx: &mut u64| {
        for &p in probs {
            *tx += 1;
            if rng.gen::<f64>() >= p {
                return false;
            }
        }
        true
    };
    match strategy {
        UnicastStrategy::EndToEndRetransmission => loop {
            if attempt(rng, &mut tx) && (!lossy || probs.iter().rev().all(|&p| rng.gen::<f64>() < p)) {
                break tx;
            }
        },
        UnicastStrategy::EndToEndCoding => loop {
            if attempt(rng, &mut tx) {
                break tx;
            }
        },
        UnicastStrategy::LinkByLinkRetransmission => {
            for &p in probs {
                loop {
                    tx += 1;
                    if rng.gen::<f64>() < p && (!lossy || rng.gen::<f64>() < p) {
                        break;
                    }
                }
            }
            tx
        }
        UnicastStrategy::PathCoding | UnicastStrategy::FullCoding => unreachable!("exact strategies"),
    }
}

/// Expected transmissions per packet of `strategy` from `s` to `t`.
/// Retransmission schemes and end-to-end coding are estimated by Monte
/// Carlo with a one-round timeout; path coding is exact and full coding
/// solves the lossy subgraph LP at unit rate.
pub fn unicast_cost(
    strategy: UnicastStrategy,
    h: &Hypernetwork,
    s: usize,
    t: usize,
    config: &UnicastConfig,
) -> Result<UnicastEstimate> {
    let (net, probs) = link_view(h)?;
    let req = MulticastRequest::new(h.node_count(), s, &[t], 1.0)?;
    if strategy == UnicastStrategy::FullCoding {
        let sol = solve_lossy(h, &req).map_err(|e| match e {
            Error::LpInfeasible => Error::Unreachable { from: s, target: t },
            e => e,
        })?;
        return Ok(UnicastEstimate { strategy, mean: sol.cost, stderr: 0.0, path: None });
    }
    let path = shortest_path(&net, &path_weights(strategy, &probs, config.acks), s, t)?;
    let pp: Vec<f64> = path.arcs.iter().map(|&e| probs[e]).collect();
    if strategy == UnicastStrategy::PathCoding {
        let mean = path_expectation(strategy, &pp, config.acks).expect("path strategy");
        return Ok(UnicastEstimate { strategy, mean, stderr: 0.0, path: Some(path.nodes) });
    }
    if config.packets < 2 {
        return Err(Error::InvalidArgument("at least two packets are needed for an error estimate".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(strategy as u64);
    let samples: Vec<f64> = (0..config.packets)
        .map(|_| simulate_packet(strategy, &pp, config.acks, &mut rng) as f64)
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(UnicastEstimate { strategy, mean, stderr: (var / n).sqrt(), path: Some(path.nodes) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::ReceptionMap;

    fn line(probs: &[f64]) -> Hypernetwork {
        let mut h = Hypernetwork::with_nodes(probs.len() + 1);
        let mut map = ReceptionMap::new();
        for (i, &p) in probs.iter().enumerate() {
            h.add_hyperarc(i, &[i + 1], 1.0).unwrap();
            map.set(i, i + 1, p).unwrap();
        }
        h.set_reception(map);
        h
    }

    #[test]
    fn perfect_link_costs_one_everywhere() {
        let h = line(&[1.0]);
        for s in UnicastStrategy::ALL {
            let e = unicast_cost(s, &h, 0, 1, &UnicastConfig::default()).unwrap();
            assert!((e.mean - 1.0).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn half_link_with_perfect_acks_costs_two() {
        let h = line(&[0.5]);
        assert_eq!(
            path_expectation(UnicastStrategy::LinkByLinkRetransmission, &[0.5], AckModel::Perfect),
            Some(2.0)
        );
        let cfg = UnicastConfig { packets: 20_000, acks: AckModel::Perfect, ..Default::default() };
        let e = unicast_cost(UnicastStrategy::LinkByLinkRetransmission, &h, 0, 1, &cfg).unwrap();
        assert!((e.mean - 2.0).abs() < 3.0 * e.stderr);
    }

    #[test]
    fn two_hop_full_coding_is_four() {
        let h = line(&[0.5, 0.5]);
        let e = unicast_cost(UnicastStrategy::FullCoding, &h, 0, 2, &UnicastConfig::default()).unwrap();
        assert!((e.mean - 4.0).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_matches_closed_forms() {
        let probs = [0.9, 0.6, 0.75];
        let h = line(&probs);
        for acks in [AckModel::Lossy, AckModel::Perfect] {
            for s in &UnicastStrategy::ALL[..3] {
                let cfg = UnicastConfig { packets: 20_000, seed: 3, acks };
                let e = unicast_cost(*s, &h, 0, 3, &cfg).unwrap();
                let exact = path_expectation(*s, &probs, acks).unwrap();
                assert!((e.mean - exact).abs() < 4.0 * e.stderr, "{s:?} {acks:?} {} vs {exact}", e.mean);
            }
        }
    }

    #[test]
    fn unreachable_sink_is_an_error() {
        let h = line(&[0.5, 0.0]);
        for s in UnicastStrategy::ALL {
            assert!(unicast_cost(s, &h, 0, 2, &UnicastConfig::default()).is_err(), "{s:?}");
        }
    }
}
