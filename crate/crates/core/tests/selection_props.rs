mod common;

use common::{brute_force_min, eligible_oracle, k_grid, random_instance, SMALL};
use kgsqueeze::selection::{quota, select, select_with_quota, total_entropy, SelectionConfig, Strategy};
use kgsqueeze::{Entity, ProbabilityGraph, RawCandidate};
use proptest::prelude::*;

fn cfg(k: f64, d: u32, s: Strategy, seed: u64) -> SelectionConfig {
    SelectionConfig::new(k, d, s).unwrap().with_seed(seed)
}

/// Ten quadruples around `c`; the cheapest one (one-hot) sits three hops out.
fn ten_quadruple_graph() -> ProbabilityGraph {
    let ids = ["c", "a", "b", "x", "l1", "l2", "l3", "l4", "l5", "l6"];
    let ents = ids.iter().map(|id| Entity::new(*id, id.to_uppercase())).collect();
    let two = |h: &str, t: &str, p: f64| RawCandidate::new(h, t, [("r", p), ("s", 1.0 - p)]);
    let cands = vec![
        two("c", "a", 0.55),
        two("a", "b", 0.97),
        two("b", "x", 1.0),
        two("c", "l1", 0.9),
        two("c", "l2", 0.6),
        two("c", "l3", 0.99),
        two("l3", "l4", 0.8),
        two("c", "l5", 0.7),
        two("l5", "l6", 0.95),
        two("c", "l6", 0.51),
    ];
    ProbabilityGraph::build("", vec!["r".into(), "s".into()], ents, cands).unwrap()
}

#[test]
fn half_compression_depth_two() {
    let g = ten_quadruple_graph();
    let r = select(&g, &cfg(0.5, 2, Strategy::Proposed, 0)).unwrap();
    assert_eq!(r.quota, 5);
    assert_eq!(r.effective_depth, 2);
    assert!(!r.selected.contains(&2), "the depth-3 quadruple must be excluded");
    // p = 0.99, 0.97, 0.95, 0.9, 0.8 in ascending entropy
    assert_eq!(r.selected, vec![5, 1, 8, 3, 6]);
    let (_, pool) = eligible_oracle(&g, 2, 5).unwrap();
    assert_eq!(r.semantic_uncertainty, brute_force_min(&g, &pool, 5));
}

#[test]
fn full_compression_is_the_whole_graph_for_every_strategy() {
    for name in common::FIXTURES {
        let g = common::fixture(name);
        let sus: Vec<u64> = Strategy::ALL
            .iter()
            .map(|&s| {
                let r = select(&g, &cfg(1.0, 2, s, 3)).unwrap();
                assert_eq!(r.quota, g.len());
                r.semantic_uncertainty.to_bits()
            })
            .collect();
        assert!(sus.windows(2).all(|w| w[0] == w[1]), "{name}");
    }
}

#[test]
fn hangzhou_depth_one_is_hangzhou_star() {
    let g = common::fixture("hangzhou.json");
    let hz = common::entity(&g, "hangzhou");
    let t = kgsqueeze::all_distances(&g, hz);
    let elig = kgsqueeze::selection::eligible(&g, &t, 1);
    let incident: Vec<usize> =
        (0..g.len()).filter(|&i| g.quadruples()[i].head == hz || g.quadruples()[i].tail == hz).collect();
    assert_eq!(elig, incident);
    assert_eq!(elig.len(), 5);
}

#[test]
fn relaxation_reaches_birth_date_at_full_compression() {
    let g = common::fixture("hangzhou.json");
    let r = select(&g, &cfg(1.0, 2, Strategy::Proposed, 0)).unwrap();
    assert_eq!(r.effective_depth, 3);
    assert_eq!(r.relaxation_steps, 1);
    assert!(!r.disconnected_fallback);
    let r = select(&g, &cfg(0.8, 2, Strategy::Proposed, 0)).unwrap();
    assert_eq!(r.effective_depth, 2);
}

#[test]
fn zero_quota_from_budget() {
    let g = common::fixture("hangzhou.json");
    let r = select_with_quota(&g, &cfg(1.0, 2, Strategy::OrderBack, 0), 0).unwrap();
    assert!(r.selected.is_empty());
    assert_eq!(r.semantic_uncertainty, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn proposed_is_the_exhaustive_optimum(seed in any::<u64>(), ki in 1usize..=10, depth in 0u32..=3) {
        let g = random_instance(seed, &SMALL);
        let k = ki as f64 / 10.0;
        let h = quota(k, g.len());
        let r = select(&g, &cfg(k, depth, Strategy::Proposed, 0)).unwrap();
        match eligible_oracle(&g, depth, h) {
            Some((d, pool)) => {
                prop_assert!(!r.disconnected_fallback);
                prop_assert_eq!(r.effective_depth, d);
                prop_assert_eq!(r.semantic_uncertainty, brute_force_min(&g, &pool, h));
            }
            None => prop_assert!(r.disconnected_fallback),
        }
    }

    #[test]
    fn every_strategy_meets_the_quota(seed in any::<u64>(), ki in 1usize..=10, depth in 0u32..=3, run in 0u64..5) {
        let g = random_instance(seed, &SMALL);
        let k = ki as f64 / 10.0;
        for s in Strategy::ALL {
            let r = select(&g, &cfg(k, depth, s, seed).with_run(run)).unwrap();
            prop_assert_eq!(r.selected.len(), quota(k, g.len()));
            prop_assert_eq!(r.quota, r.selected.len());
            let mut seen = r.selected.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), r.selected.len());
            prop_assert!(r.selected.iter().all(|&i| i < g.len()));
            prop_assert!(r.effective_depth >= depth);
            prop_assert!((r.semantic_uncertainty - total_entropy(&g, &r.selected)).abs() < 1e-9);
            if !r.disconnected_fallback {
                let t = kgsqueeze::all_distances(&g, kgsqueeze::select_initial_node(&g));
                let inside = r.selected.iter().all(|&i| {
                    let q = &g.quadruples()[i];
                    t.within(q.head, q.tail, r.effective_depth)
                });
                prop_assert!(inside, "selection leaves the effective depth");
            }
        }
    }

    #[test]
    fn proposed_dominates_baselines(seed in any::<u64>(), ki in 1usize..=10, run in 0u64..10) {
        let g = random_instance(seed, &SMALL);
        let k = ki as f64 / 10.0;
        let best = select(&g, &cfg(k, 2, Strategy::Proposed, 0)).unwrap().semantic_uncertainty;
        for s in &Strategy::ALL[1..] {
            let su = select(&g, &cfg(k, 2, *s, seed).with_run(run)).unwrap().semantic_uncertainty;
            prop_assert!(best <= su, "{} beat proposed: {} < {}", s, su, best);
        }
    }

    #[test]
    fn nested_while_depth_is_unchanged(seed in any::<u64>()) {
        let g = random_instance(seed, &SMALL);
        let runs: Vec<_> = k_grid().into_iter().map(|k| select(&g, &cfg(k, 2, Strategy::Proposed, 0)).unwrap()).collect();
        for w in runs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.disconnected_fallback || b.disconnected_fallback || a.effective_depth != b.effective_depth {
                continue;
            }
            prop_assert!(a.selected.iter().all(|i| b.selected.contains(i)));
            prop_assert!(a.semantic_uncertainty <= b.semantic_uncertainty);
        }
    }
}

#[test]
fn random_baseline_is_reproducible() {
    let g = common::fixture("marie_curie.json");
    let c = cfg(0.4, 2, Strategy::Random, 99);
    assert_eq!(select(&g, &c).unwrap(), select(&g, &c).unwrap());
    assert_ne!(select(&g, &c).unwrap().selected, select(&g, &c.clone().with_seed(100)).unwrap().selected);
}
