mod common;

use common::{random_network, rng};
use mincast::dynamiccast::{
    legal_transition, plan_transition, supports, DynamicConfig, DynamicMulticast, MembershipProcess, Phase, Policy,
};
use mincast::netmodel::{Network, Subgraph};
use rand::seq::SliceRandom;
use rand::Rng;

fn sg(v: &[f64]) -> Subgraph {
    Subgraph::new(v.to_vec()).unwrap()
}

fn random_group(universe: &[usize], r: &mut impl Rng) -> Vec<usize> {
    let k = r.gen_range(1..=universe.len().min(4));
    let mut g: Vec<usize> = universe.choose_multiple(r, k).copied().collect();
    g.sort_unstable();
    g
}

#[test]
fn diamond_sequence_is_planned_verbatim() {
    let net = Network::diamond();
    let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
    let from = d.static_optimum(&[1, 3]).unwrap();
    let to = d.static_optimum(&[2, 3]).unwrap();
    assert_eq!(from, sg(&[1.0, 0.0, 1.0, 0.0]));
    assert_eq!(to, sg(&[0.0, 1.0, 0.0, 1.0]));
    let plan = plan_transition(&net, 0, &from, &to, &[3], 1.0).unwrap();
    assert_eq!(plan.steps, vec![from, sg(&[1.0, 1.0, 1.0, 1.0]), to]);
}

#[test]
fn planned_intermediates_serve_persisting_sinks() {
    let mut r = rng(11);
    for seed in 0..20 {
        let net = random_network(7, 0.35, 5, 2, 500 + seed);
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        for _ in 0..10 {
            let old = random_group(d.universe(), &mut r);
            let new = random_group(d.universe(), &mut r);
            let persist: Vec<usize> = old.iter().copied().filter(|v| new.contains(v)).collect();
            let z = d.static_optimum(&old).unwrap();
            let target = d.static_optimum(&new).unwrap();
            let plan = plan_transition(&net, 0, &z, &target, &persist, 1.0).unwrap();
            assert!(plan.moves() <= 2);
            for w in plan.steps.windows(2) {
                assert!(legal_transition(&net, 0, &w[0], &w[1], &persist, 1.0).unwrap());
            }
            for step in &plan.steps {
                assert!(supports(&net, step, 0, &persist, 1.0).unwrap());
            }
            // Everything after the first move also serves the new group.
            for step in &plan.steps[1..] {
                assert!(supports(&net, step, 0, &new, 1.0).unwrap());
            }
        }
    }
}

#[test]
fn service_continuity_over_ten_thousand_steps() {
    let net = random_network(8, 0.35, 5, 2, 77);
    let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
    let process = MembershipProcess { birth: 0.4, death: 0.05 };
    let mut steps = 0;
    let mut two_phase = 0;
    for rep in 0..100 {
        let cfg = DynamicConfig { seed: 9, horizon: 100, ..Default::default() };
        // `trajectory` checks legality and continuity at every step.
        let t = d.trajectory(Policy::MyopicTwoPhase, &[1, 3, 5], &process, &cfg, rep).unwrap();
        steps += t.records.len();
        two_phase += t.records.iter().filter(|r| r.phase == Phase::TwoA).count();
        let replay: f64 = t.records.iter().map(|r| r.step_cost).sum();
        assert_eq!(replay, t.cost);
    }
    assert!(steps >= 10_000, "{steps}");
    assert!(two_phase > 0);
}

#[test]
fn fixed_broadcast_matches_the_absorption_time() {
    let net = random_network(6, 0.4, 5, 2, 31);
    let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
    let process = MembershipProcess { birth: 0.3, death: 0.2 };
    let cfg = DynamicConfig { reps: 4000, seed: 2, ..Default::default() };
    let e = d.simulate_policy(Policy::FixedBroadcast, &[1, 4], &process, &cfg).unwrap();
    let expected = d.cost(d.broadcast()) * process.expected_absorption_time(2, 5).unwrap();
    assert_eq!(e.unabsorbed, 0);
    assert!((e.mean - expected).abs() <= 3.0 * e.stderr, "{} vs {expected} (se {})", e.mean, e.stderr);
}

#[test]
fn empirical_survival_matches_the_chain() {
    let process = MembershipProcess { birth: 0.3, death: 0.35 };
    let universe: Vec<usize> = (1..7).collect();
    let horizon = 40;
    let mut alive = vec![0usize; horizon];
    let mut r = rng(4);
    let chains = 100_000;
    for _ in 0..chains {
        let mut g = vec![2, 5];
        for a in alive.iter_mut() {
            if g.is_empty() {
                break;
            }
            *a += 1;
            g = process.step(&g, &universe, &mut r).next;
        }
    }
    let exact = process.survival(2, 6, horizon);
    for (m, (&a, &p)) in alive.iter().zip(&exact).enumerate() {
        let f = a as f64 / chains as f64;
        let se = (p * (1.0 - p) / chains as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * se + 1e-12, "m={m}: {f} vs {p}");
    }
    assert!(exact.windows(2).all(|w| w[1] <= w[0]) && exact[horizon - 1] < 0.2);
}

#[test]
fn a_legal_move_always_exists_in_two_steps() {
    let mut r = rng(3);
    for seed in 0..10 {
        let net = random_network(7, 0.3, 5, 2, 600 + seed);
        let d = DynamicMulticast::new(&net, 0, 1.0).unwrap();
        for _ in 0..10 {
            let z = d.static_optimum(&random_group(d.universe(), &mut r)).unwrap();
            let group = random_group(d.universe(), &mut r);
            let target = d.static_optimum(&group).unwrap();
            let up = z.max_with(&target);
            assert!(legal_transition(&net, 0, &z, &up, &group, 1.0).unwrap());
            assert!(legal_transition(&net, 0, &up, &target, &group, 1.0).unwrap());
            assert!(up.rates().iter().zip(net.capacities()).all(|(v, c)| *v <= c));
        }
    }
}
