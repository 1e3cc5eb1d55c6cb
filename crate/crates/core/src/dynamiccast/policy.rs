use std::collections::HashMap;
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::membership::MembershipProcess;
use super::transition::{comparable, legal_transition, supports};
use crate::flowcore::solve_multicast_lp;
use crate::netmodel::io::Table;
use crate::netmodel::{round_sig, MulticastRequest, Network, Subgraph};
use crate::{row, Error, Result};

/// Stationary rules choosing the next subgraph from the current one and
/// the current group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Hold a minimum-cost broadcast subgraph until the group empties.
    FixedBroadcast,
    /// Move towards the static optimum of the current group, through the
    /// componentwise maximum when the two are not comparable.
    #[default]
    MyopicTwoPhase,
}

/// Kind of move made in one time unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "single")]
    Single,
    /// First half of a two-phase move: grow to the maximum.
    #[serde(rename = "two-a")]
    TwoA,
    /// Second half: shrink to the target.
    #[serde(rename = "two-b")]
    TwoB,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Single => "single",
            Phase::TwoA => "two-a",
            Phase::TwoB => "two-b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicConfig {
    /// Steps after which an unabsorbed trajectory is cut and reported.
    pub horizon: usize,
    pub reps: usize,
    pub seed: u64,
    /// Hold the group fixed during the second unit of a two-phase move.
    pub freeze_two_phase: bool,
}

impl Default for DynamicConfig {
    fn default() -> Self {
        DynamicConfig { horizon: 10_000, reps: 100, seed: 0, freeze_two_phase: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub m: usize,
    pub group_size: usize,
    pub step_cost: f64,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub cost: f64,
    pub absorbed: bool,
}

impl Trajectory {
    pub fn trace_table(&self) -> Table {
        let mut t = Table::new(&["m", "group_size", "step_cost", "phase"]);
        for r in &self.records {
            t.push(row![r.m, r.group_size, r.step_cost, r.phase.name()]);
        }
        t
    }
}

/// Monte Carlo estimate of a policy's expected total cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Normal-approximation 95% interval.
    pub ci95: (f64, f64),
    pub absorbed: usize,
    /// Trajectories cut at the horizon; excluded from the estimate.
    pub unabsorbed: usize,
    pub steps: usize,
}

/// Dynamic multicast on a wireline network with linear arc costs and
/// capacities as the separable constraints.
pub struct DynamicMulticast<'a> {
    net: &'a Network,
    source: usize,
    rate: f64,
    universe: Vec<usize>,
    broadcast: Subgraph,
    cache: Mutex<HashMap<Vec<usize>, Subgraph>>,
}

/// LP vertices with round-off removed, so equal supports compare equal.
fn snap(z: Subgraph) -> Subgraph {
    Subgraph::from_clamped(
        z.rates()
            .iter()
            .map(|&v| if v.abs() < 1e-12 { 0.0 } else { round_sig(v, 12) })
            .collect(),
    )
}

impl<'a> DynamicMulticast<'a> {
    /// Fails unless some subgraph supports broadcast to every other node.
    pub fn new(net: &'a Network, source: usize, rate: f64) -> Result<Self> {
        if source >= net.node_count() {
            return Err(Error::UnknownNode(source.to_string()));
        }
        let universe: Vec<usize> = (0..net.node_count()).filter(|&v| v != source).collect();
        let req = MulticastRequest::new(net.node_count(), source, &universe, rate)?;
        let broadcast = match solve_multicast_lp(net, &req) {
            Ok(sol) => snap(sol.z),
            Err(Error::LpInfeasible) => {
                return Err(Error::Infeasible("no subgraph supports broadcast".into()));
            }
            Err(e) => return Err(e),
        };
        Ok(DynamicMulticast { net, source, rate, universe, broadcast, cache: Mutex::default() })
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn broadcast(&self) -> &Subgraph {
        &self.broadcast
    }

    pub fn cost(&self, z: &Subgraph) -> f64 {
        z.linear_cost(&self.net.costs())
    }

    /// Minimum-cost subgraph for `group`, memoised.
    pub fn static_optimum(&self, group: &[usize]) -> Result<Subgraph> {
        if group.is_empty() {
            return Ok(Subgraph::zeros(self.net.arc_count()));
        }
        if let Some(z) = self.cache.lock().expect("cache lock").get(group) {
            return Ok(z.clone());
        }
        let req = MulticastRequest::new(self.net.node_count(), self.source, group, self.rate)?;
        let z = snap(solve_multicast_lp(self.net, &req)?.z);
        self.cache.lock().expect("cache lock").insert(group.to_vec(), z.clone());
        Ok(z)
    }

    pub fn initial(&self, policy: Policy, group: &[usize]) -> Result<Subgraph> {
        match policy {
            Policy::FixedBroadcast => Ok(self.broadcast.clone()),
            Policy::MyopicTwoPhase => self.static_optimum(group),
        }
    }

    /// Next subgraph from `z` for `group`.
    pub fn decide(&self, policy: Policy, z: &Subgraph, group: &[usize]) -> Result<(Subgraph, Phase)> {
        match policy {
            Policy::FixedBroadcast => Ok((self.broadcast.clone(), Phase::Single)),
            Policy::MyopicTwoPhase => {
                let target = self.static_optimum(group)?;
                if comparable(z, &target) {
                    Ok((target, Phase::Single))
                } else {
                    Ok((z.max_with(&target), Phase::TwoA))
                }
            }
        }
    }

    /// One trajectory from `group` until the group empties or the horizon.
    /// Every move is checked for legality and for uninterrupted service to
    /// the sinks present before and after it.
    pub fn trajectory(
        &self,
        policy: Policy,
        group: &[usize],
        process: &MembershipProcess,
        config: &DynamicConfig,
        rep: u64,
    ) -> Result<Trajectory> {
        process.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(rep);
        let mut group = group.to_vec();
        group.sort_unstable();
        group.dedup();
        if group.iter().any(|v| !self.universe.contains(v)) {
            return Err(Error::InvalidRequest("group members must be non-source nodes".into()));
        }
        let mut z = self.initial(policy, &group)?;
        let mut previous = group.clone();
        let mut pending_b = false;
        let mut records = Vec::new();
        let mut cost = 0.0;
        for m in 0..config.horizon {
            if group.is_empty() {
                break;
            }
            let (next, mut phase) = self.decide(policy, &z, &group)?;
            if pending_b && phase == Phase::Single {
                phase = Phase::TwoB;
            }
            if !legal_transition(self.net, self.source, &z, &next, &group, self.rate)? {
                return Err(Error::Numerical(format!("policy made an illegal move at step {m}")));
            }
            let persist: Vec<usize> = group.iter().copied().filter(|v| previous.contains(v)).collect();
            for held in [&z, &next] {
                if !supports(self.net, held, self.source, &persist, self.rate)? {
                    return Err(Error::Numerical(format!("service to persisting sinks broke at step {m}")));
                }
            }
            let step_cost = self.cost(&next);
            cost += step_cost;
            records.push(StepRecord { m, group_size: group.len(), step_cost, phase });
            z = next;
            previous = group.clone();
            pending_b = phase == Phase::TwoA;
            if !(pending_b && config.freeze_two_phase) {
                group = process.step(&group, &self.universe, &mut rng).next;
            }
        }
        Ok(Trajectory { records, cost, absorbed: group.is_empty() })
    }

    /// Expected total cost of `policy` over `config.reps` independent
    /// trajectories.
    pub fn simulate_policy(
        &self,
        policy: Policy,
        group: &[usize],
        process: &MembershipProcess,
        config: &DynamicConfig,
    ) -> Result<PolicyEstimate> {
        if config.reps == 0 {
            return Err(Error::InvalidArgument("at least one replication is required".into()));
        }
        let runs = (0..config.reps as u64)
            .into_par_iter()
            .map(|rep| self.trajectory(policy, group, process, config, rep))
            .collect::<Result<Vec<_>>>()?;
        let costs: Vec<f64> = runs.iter().filter(|t| t.absorbed).map(|t| t.cost).collect();
        let steps = runs.iter().map(|t| t.records.len()).sum();
        let n = costs.len() as f64;
        let mean = if costs.is_empty() { f64::NAN } else { costs.iter().sum::<f64>() / n };
        let stderr = if costs.len() < 2 {
            f64::NAN
        } else {
            (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        };
        Ok(PolicyEstimate {
            mean,
            stderr,
            ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
            absorbed: costs.len(),
            unabsorbed: runs.len() - costs.len(),
            steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_arc() -> Network {
        let mut net = Network::with_nodes(2);
        net.add_arc(0, 1, 3.0, 1.0).unwrap();
        net
    }

    #[test]
    fn empty_group_costs_nothing() {
        let net = Network::diamond();
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        let t = d.trajectory(Policy::MyopicTwoPhase, &[], &MembershipProcess::default(), &DynamicConfig::default(), 0);
        let t = t.unwrap();
        assert_eq!((t.cost, t.absorbed, t.records.len()), (0.0, true, 0));
    }

    #[test]
    fn forced_one_step_absorption() {
        let net = one_arc();
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        let p = MembershipProcess { birth: 0.0, death: 1.0 };
        for policy in [Policy::FixedBroadcast, Policy::MyopicTwoPhase] {
            let e = d.simulate_policy(policy, &[1], &p, &DynamicConfig { reps: 5, ..Default::default() }).unwrap();
            assert_eq!((e.mean, e.stderr, e.absorbed), (3.0, 0.0, 5));
        }
    }

    #[test]
    fn myopic_moves_in_two_phases_on_the_diamond() {
        let net = Network::diamond();
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        let z = d.static_optimum(&[1, 3]).unwrap();
        assert_eq!(z.rates(), &[1.0, 0.0, 1.0, 0.0]);
        let (a, pa) = d.decide(Policy::MyopicTwoPhase, &z, &[2, 3]).unwrap();
        assert_eq!((a.rates(), pa), (&[1.0, 1.0, 1.0, 1.0][..], Phase::TwoA));
        let (b, _) = d.decide(Policy::MyopicTwoPhase, &a, &[2, 3]).unwrap();
        assert_eq!(b.rates(), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn broadcast_must_be_possible() {
        let mut net = Network::with_nodes(3);
        net.add_arc(0, 1, 1.0, 1.0).unwrap();
        assert!(matches!(DynamicMulticast::new(&net, 0, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn trace_replays_to_the_total() {
        let net = Network::butterfly();
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        let t = d
            .trajectory(Policy::MyopicTwoPhase, &[5], &MembershipProcess::default(), &DynamicConfig::default(), 3)
            .unwrap();
        let total: f64 = t.records.iter().map(|r| r.step_cost).sum();
        assert_eq!(total, t.cost);
        assert_eq!(t.trace_table().header, ["m", "group_size", "step_cost", "phase"]);
    }
}
