use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scenario};
use crate::baselines::{dst_approx, mip_heuristic, unicast_cost, UnicastConfig, UnicastStrategy};
use crate::convexpd::pd_solve;
use crate::dynamiccast::{DynamicConfig, DynamicMulticast, MembershipProcess, Policy};
use crate::flowcore::{solve_multicast_lp, verify_feasible};
use crate::netmodel::io::{load_network, Cell, NetworkDoc, Table};
use crate::netmodel::{
    build_geometric_network, random_wireline, ConvexCost, GeometricParams, Hypernetwork, MulticastRequest, Network,
    Subgraph, WirelineParams,
};
use crate::subgrad::{dual_subgradient_solve, DualProblem, SubgradConfig};
use crate::wireless::{hyper_max_flows, solve_nested, verify_hyper_feasible};
use crate::{row, Error, Result};

/// Files written by a run and the per-method summary.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub scenario: Scenario,
    /// Columns `nodes, method, mean, stderr, count`.
    pub summary: Table,
    pub results: Table,
    pub artifacts: Vec<PathBuf>,
}

impl RunSummary {
    /// Mean of `method` at `nodes`, if present.
    pub fn mean(&self, nodes: usize, method: &str) -> Option<f64> {
        self.summary
            .rows
            .iter()
            .find(|r| r[0] == nodes.to_string() && r[1] == method)
            .and_then(|r| r[2].parse().ok())
    }
}

/// Deterministic per-instance seed.
pub fn instance_seed(base: u64, nodes: usize, rep: usize) -> u64 {
    let mut x = base ^ ((nodes as u64) << 32) ^ rep as u64;
    // splitmix64 finaliser
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One result row: instance id, size, seed, then `(method, value, stderr)`.
struct Outcome {
    id: String,
    nodes: usize,
    seed: u64,
    values: Vec<(String, Option<f64>, f64)>,
    trace: Option<Table>,
}

/// Run an experiment and write `results.csv`, `summary.csv` and any traces
/// under `config.output`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes = pool.install(|| match config.scenario {
        Scenario::StaticWireline => static_wireline(config),
        Scenario::StaticWireless => static_wireless(config),
        Scenario::ConvexPd => convex_pd(config),
        Scenario::UnicastBench => unicast_bench(config),
        Scenario::Dynamic => dynamic(config),
    })?;
    write_outputs(config, outcomes)
}

fn tasks(config: &ExperimentConfig) -> Vec<(usize, usize, u64)> {
    let mut v = Vec::new();
    for &n in &config.instance.nodes {
        for rep in 0..config.replications {
            v.push((n, rep, instance_seed(config.seed, n, rep)));
        }
    }
    v
}

fn for_each_instance<F>(config: &ExperimentConfig, f: F) -> Result<Vec<Outcome>>
where
    F: Fn(usize, usize, u64) -> Result<Outcome> + Sync,
{
    tasks(config)
        .into_par_iter()
        .map(|(n, rep, seed)| f(n, rep, seed).map_err(|e| e.at_seed(seed)))
        .collect()
}

fn pick_sinks(rng: &mut ChaCha8Rng, pool: &[usize], count: usize) -> Result<Vec<usize>> {
    if pool.len() < count {
        return Err(Error::Infeasible(format!("only {} candidate sinks for {count}", pool.len())));
    }
    let mut v: Vec<usize> = pool.choose_multiple(rng, count).copied().collect();
    v.sort_unstable();
    Ok(v)
}

fn fixture(config: &ExperimentConfig) -> Result<Option<(NetworkDoc, usize, Vec<usize>)>> {
    let inst = &config.instance;
    let Some(path) = &inst.network else { return Ok(None) };
    let doc = load_network(path)?;
    let index = |name: &str| match &doc {
        NetworkDoc::Wireline(n) => n.require(name),
        NetworkDoc::Wireless(h) => h.require(name),
    };
    let s = index(inst.source.as_deref().unwrap_or_default())?;
    let sinks = inst.sink_names.iter().map(|t| index(t)).collect::<Result<Vec<_>>>()?;
    Ok(Some((doc, s, sinks)))
}

fn ensure(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Numerical(format!("{what} subgraph failed the feasibility check")))
    }
}

fn wireline_instance(config: &ExperimentConfig, net: &Network, req: &MulticastRequest) -> Result<Vec<(String, Option<f64>, f64)>> {
    let lp = solve_multicast_lp(net, req)?;
    ensure(verify_feasible(net, &lp.z, req)?.feasible, "LP")?;
    let tree = dst_approx(net, req.source, &req.sinks, config.solver.dst_level)?;
    let tz = tree.subgraph(net.arc_count(), req.rate);
    ensure(verify_feasible(net, &tz, req)?.feasible, "Steiner tree")?;
    let mut v = vec![("lp".into(), Some(lp.cost), 0.0), ("dst".into(), Some(tree.cost * req.rate), 0.0)];
    if config.solver.iterations > 0 {
        let sg = dual_subgradient_solve(DualProblem::Wireline(net), req, &subgrad_config(config, 0))?;
        let ok = sg.feasible && verify_feasible(net, &sg.z, req)?.feasible;
        v.push(("subgrad".into(), ok.then_some(sg.cost), 0.0));
    }
    Ok(v)
}

fn subgrad_config(config: &ExperimentConfig, seed: u64) -> SubgradConfig {
    SubgradConfig {
        schedule: config.solver.schedule.clone(),
        iterations: config.solver.iterations,
        seed,
        ..SubgradConfig::default()
    }
}

fn static_wireline(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let inst = &config.instance;
    if let Some((doc, s, sinks)) = fixture(config)? {
        let NetworkDoc::Wireline(net) = doc else {
            return Err(Error::Config("static_wireline needs a wireline network".into()));
        };
        let req = MulticastRequest::new(net.node_count(), s, &sinks, inst.rate)?;
        let values = wireline_instance(config, &net, &req)?;
        return Ok(vec![Outcome { id: "fixture".into(), nodes: net.node_count(), seed: config.seed, values, trace: None }]);
    }
    for_each_instance(config, |n, rep, seed| {
        let net = random_wireline(&WirelineParams {
            count: n,
            density: inst.density,
            max_cost: inst.max_cost,
            capacity: inst.capacity,
            seed,
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = rng.gen_range(0..n);
        let others: Vec<usize> = (0..n).filter(|&v| v != s).collect();
        let req = MulticastRequest::new(n, s, &pick_sinks(&mut rng, &others, inst.sinks.min(n - 1))?, inst.rate)?;
        let values = wireline_instance(config, &net, &req)?;
        Ok(Outcome { id: format!("n{n}-r{rep}"), nodes: n, seed, values, trace: None })
    })
}

/// Nodes that can receive the full rate from `source` over every hyperarc.
fn reachable(h: &Hypernetwork, source: usize, rate: f64) -> Result<Vec<usize>> {
    let n = h.node_count();
    let all: Vec<usize> = (0..n).filter(|&v| v != source).collect();
    if all.is_empty() {
        return Ok(all);
    }
    let probe = MulticastRequest::new(n, source, &all, rate)?;
    let z = Subgraph::from_clamped(vec![1e6 * rate; h.hyperarc_count()]);
    let flows = hyper_max_flows(h, &z, &probe)?;
    Ok(all.into_iter().zip(flows).filter(|(_, f)| *f >= rate * (1.0 - 1e-9)).map(|(t, _)| t).collect())
}

fn static_wireless(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let inst = &config.instance;
    for_each_instance(config, |n, rep, seed| {
        // Redraw layouts that leave too few reachable sinks.
        let mut attempt = 0u64;
        let (h, req) = loop {
            let s = seed.wrapping_add(attempt);
            let h = build_geometric_network(&GeometricParams::lossless(n, inst.side, inst.radius, s))?;
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let pool = reachable(&h, 0, inst.rate)?;
            if pool.len() >= inst.sinks {
                let sinks = pick_sinks(&mut rng, &pool, inst.sinks)?;
                break (h, MulticastRequest::new(n, 0, &sinks, inst.rate)?);
            }
            attempt += 1;
            if attempt == 1000 {
                return Err(Error::Infeasible("no connected layout in 1000 draws".into()));
            }
        };
        let lp = solve_nested(&h, &req)?;
        ensure(verify_hyper_feasible(&h, &lp.z, &req)?, "LP")?;
        let mip = mip_heuristic(&h, &req)?;
        ensure(verify_hyper_feasible(&h, &mip.z, &req)?, "MIP")?;
        let mut values = vec![("lp".into(), Some(lp.cost), 0.0), ("mip".into(), Some(mip.cost), 0.0)];
        let mut trace = None;
        if config.solver.iterations > 0 {
            let sg = dual_subgradient_solve(DualProblem::Wireless(&h), &req, &subgrad_config(config, seed))?;
            let ok = sg.feasible && verify_hyper_feasible(&h, &sg.z, &req)?;
            values.push(("subgrad".into(), ok.then_some(sg.cost), 0.0));
            trace = Some(sg.trace_table());
        }
        Ok(Outcome { id: format!("n{n}-r{rep}"), nodes: n, seed, values, trace })
    })
}

fn convex_pd(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let inst = &config.instance;
    for_each_instance(config, |n, rep, seed| {
        let net = random_wireline(&WirelineParams {
            count: n,
            density: inst.density,
            max_cost: inst.max_cost,
            capacity: inst.capacity,
            seed,
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = rng.gen_range(0..n);
        let others: Vec<usize> = (0..n).filter(|&v| v != s).collect();
        let req = MulticastRequest::new(n, s, &pick_sinks(&mut rng, &others, inst.sinks.min(n - 1))?, inst.rate)?;
        let scales: Vec<f64> = net.costs().iter().map(|c| c / inst.max_cost as f64).collect();
        let costs = ConvexCost::exponential(&scales, config.solver.smoothing)?;
        let report = pd_solve(&net, &req, &costs, &config.solver.pd)?;
        if let Some(z) = &report.z {
            ensure(verify_feasible(&net, z, &req)?.feasible, "recovered")?;
        }
        let values = vec![
            ("pd".into(), Some(report.cost), 0.0),
            ("pd_recovered".into(), report.recovered_cost, 0.0),
            ("kkt_residual".into(), Some(report.kkt_residual), 0.0),
        ];
        Ok(Outcome { id: format!("n{n}-r{rep}"), nodes: n, seed, values, trace: Some(report.trace_table()) })
    })
}

fn unicast_bench(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let inst = &config.instance;
    for_each_instance(config, |n, rep, seed| {
        let mut attempt = 0u64;
        loop {
            let s_seed = seed.wrapping_add(attempt);
            let h = build_geometric_network(&GeometricParams::lossy(n, inst.radius, s_seed))?;
            let mut rng = ChaCha8Rng::seed_from_u64(s_seed);
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            let cfg = UnicastConfig { packets: config.solver.packets, seed: s_seed, acks: config.solver.acks };
            let est = UnicastStrategy::ALL.iter().map(|&st| unicast_cost(st, &h, s, t, &cfg)).collect::<Result<Vec<_>>>();
            match est {
                Ok(est) => {
                    let values = est.into_iter().map(|e| (e.strategy.name().to_string(), Some(e.mean), e.stderr)).collect();
                    return Ok(Outcome { id: format!("n{n}-r{rep}"), nodes: n, seed: s_seed, values, trace: None });
                }
                Err(Error::Unreachable { .. }) if attempt < 1000 => attempt += 1,
                Err(e) => return Err(e),
            }
        }
    })
}

fn dynamic(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let inst = &config.instance;
    let d = &config.dynamic;
    let process = MembershipProcess { birth: d.birth, death: d.death };
    let mut out = Vec::new();
    for &n in &inst.nodes {
        let seed = instance_seed(config.seed, n, 0);
        let run = || -> Result<Vec<Outcome>> {
            let net = random_wireline(&WirelineParams {
                count: n,
                density: inst.density,
                max_cost: inst.max_cost,
                capacity: inst.capacity,
                seed,
            })?;
            let dm = DynamicMulticast::new(&net, 0, inst.rate)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let group = pick_sinks(&mut rng, dm.universe(), inst.sinks.min(n - 1))?;
            let sim = DynamicConfig {
                horizon: d.horizon,
                reps: config.replications,
                seed,
                freeze_two_phase: d.freeze_two_phase,
            };
            let mut rows = Vec::new();
            for &policy in &d.policies {
                let e = dm.simulate_policy(policy, &group, &process, &sim)?;
                let name = serde_json::to_value(policy).expect("serializable");
                let name = name.as_str().unwrap_or_default().to_string();
                let mut values = vec![
                    (name.clone(), Some(e.mean), e.stderr),
                    (format!("{name}_unabsorbed"), Some(e.unabsorbed as f64), 0.0),
                ];
                if policy == Policy::FixedBroadcast {
                    let tau = process.expected_absorption_time(group.len(), dm.universe().len())?;
                    values.push((format!("{name}_analytic"), Some(dm.cost(dm.broadcast()) * tau), 0.0));
                }
                let trace = dm.trajectory(policy, &group, &process, &sim, 0)?.trace_table();
                rows.push(Outcome { id: format!("n{n}-{name}"), nodes: n, seed, values, trace: Some(trace) });
            }
            Ok(rows)
        };
        out.extend(run().map_err(|e| e.at_seed(seed))?);
    }
    Ok(out)
}

fn write_outputs(config: &ExperimentConfig, outcomes: Vec<Outcome>) -> Result<RunSummary> {
    let dir = &config.output;
    std::fs::create_dir_all(dir)?;
    let mut results = Table::new(&["instance", "nodes", "seed", "method", "value", "stderr"]);
    let mut groups: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
    let mut artifacts = Vec::new();
    for o in &outcomes {
        for (method, value, se) in &o.values {
            let v = value.map_or(Cell::Text(String::new()), Cell::Float);
            results.push(vec![o.id.as_str().into(), o.nodes.into(), o.seed.into(), method.as_str().into(), v, (*se).into()]);
            if let Some(v) = value {
                groups.entry((o.nodes, method.clone())).or_default().push((*v, *se));
            }
        }
        if let Some(trace) = &o.trace {
            let path = trace_path(dir, &o.id);
            std::fs::create_dir_all(path.parent().expect("inside the output directory"))?;
            trace.save(&path)?;
            artifacts.push(path);
        }
    }
    let mut summary = Table::new(&["nodes", "method", "mean", "stderr", "count"]);
    for ((n, method), cells) in &groups {
        let v: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        // Across instances the spread gives the error; a lone estimate keeps its own.
        let se = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            cells[0].1
        };
        summary.push(row![*n, method.as_str(), mean, se, v.len()]);
    }
    let rp = dir.join("results.csv");
    let sp = dir.join("summary.csv");
    results.save(&rp)?;
    summary.save(&sp)?;
    artifacts.splice(0..0, [rp, sp]);
    Ok(RunSummary { scenario: config.scenario, summary, results, artifacts })
}

fn trace_path(dir: &Path, id: &str) -> PathBuf {
    dir.join("traces").join(format!("{id}.csv"))
}
