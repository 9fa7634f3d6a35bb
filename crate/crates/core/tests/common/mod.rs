//! Fixtures, random instances and independent oracles shared by the
//! integration tests. Nothing here calls into the code paths it checks.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use kgsqueeze::io::parse_graph_document;
use kgsqueeze::{Entity, ProbabilityGraph, RawCandidate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: [&str; 3] = ["hangzhou.json", "bruce_lee.json", "marie_curie.json"];
pub const NARRATIVE_FIXTURES: [&str; 2] = ["marie_curie.json", "bruce_lee.json"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> ProbabilityGraph {
    parse_graph_document(&fixture_bytes(name)).unwrap()
}

pub fn entity(graph: &ProbabilityGraph, id: &str) -> usize {
    graph.entity_position(id).unwrap_or_else(|| panic!("no entity {id}"))
}

/// Entropy in bits via natural logs and Neumaier-compensated summation.
pub fn entropy_oracle(p: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in p {
        if x == 0.0 {
            continue;
        }
        let term = -x * x.ln();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / std::f64::consts::LN_2
}

/// Breadth-first hop counts over undirected edges.
pub fn bfs(nodes: usize, edges: &[(usize, usize)], source: usize) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); nodes];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![None; nodes];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Most frequent endpoint; ties by token index (present before absent), then
/// declaration order.
pub fn initial_node_oracle(graph: &ProbabilityGraph) -> usize {
    let n = graph.entities().len();
    let mut count = vec![0usize; n];
    for q in graph.quadruples() {
        count[q.head] += 1;
        count[q.tail] += 1;
    }
    let mut best = 0;
    for i in 1..n {
        let ti = graph.entities()[i].first_token_index.unwrap_or(usize::MAX);
        let tb = graph.entities()[best].first_token_index.unwrap_or(usize::MAX);
        if count[i] > count[best] || (count[i] == count[best] && ti < tb) {
            best = i;
        }
    }
    best
}

fn edges(graph: &ProbabilityGraph) -> Vec<(usize, usize)> {
    graph.quadruples().iter().map(|q| (q.head, q.tail)).collect()
}

/// Eligible quadruples at the smallest depth `>= max_depth` admitting at
/// least `h`, computed from BFS distances. `None` if no depth suffices.
pub fn eligible_oracle(graph: &ProbabilityGraph, max_depth: u32, h: usize) -> Option<(u32, Vec<usize>)> {
    let dist = bfs(graph.entities().len(), &edges(graph), initial_node_oracle(graph));
    let within = |depth: u32| -> Vec<usize> {
        graph
            .quadruples()
            .iter()
            .enumerate()
            .filter(|(_, q)| matches!((dist[q.head], dist[q.tail]), (Some(a), Some(b)) if a <= depth && b <= depth))
            .map(|(i, _)| i)
            .collect()
    };
    let ceiling = dist.iter().flatten().copied().max().unwrap_or(0).max(max_depth);
    (max_depth..=ceiling).map(|d| (d, within(d))).find(|(_, e)| e.len() >= h)
}

fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().sum()
}

/// Minimum total entropy over every `h`-subset of `pool`, by enumeration.
pub fn brute_force_min(graph: &ProbabilityGraph, pool: &[usize], h: usize) -> f64 {
    fn rec(graph: &ProbabilityGraph, pool: &[usize], h: usize, start: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == h {
            let s = sorted_sum(chosen.iter().map(|&i| graph.quadruples()[i].entropy).collect());
            if s < *best {
                *best = s;
            }
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < h - chosen.len() {
                break;
            }
            chosen.push(pool[i]);
            rec(graph, pool, h, i + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(graph, pool, h, 0, &mut Vec::new(), &mut best);
    best
}

pub struct InstanceShape {
    pub entities: std::ops::RangeInclusive<usize>,
    pub quadruples: std::ops::RangeInclusive<usize>,
    /// Probability that the instance is forced to be connected.
    pub connected: f64,
}

pub const SMALL: InstanceShape = InstanceShape { entities: 3..=12, quadruples: 4..=16, connected: 0.8 };

/// Random probability graph with 2 to 5 relations and random distributions,
/// some sharply peaked and some flat.
pub fn random_instance(seed: u64, shape: &InstanceShape) -> ProbabilityGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(shape.entities.clone());
    let g = rng.random_range(shape.quadruples.clone()).max(n - 1);
    let a = rng.random_range(2..=5usize);
    let labels: Vec<String> = (0..a).map(|i| format!("r{i}")).collect();
    let ents: Vec<Entity> = (0..n)
        .map(|i| {
            let e = Entity::new(format!("e{i}"), format!("Ent{i}"));
            if rng.random_bool(0.5) {
                e.at_token(rng.random_range(0..100))
            } else {
                e
            }
        })
        .collect();

    let mut pairs = Vec::new();
    if rng.random_bool(shape.connected) {
        for i in 1..n {
            pairs.push((i, rng.random_range(0..i)));
        }
    }
    while pairs.len() < g {
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        pairs.push((u, v));
    }
    // scatter the spanning edges through the input order
    for i in (1..pairs.len()).rev() {
        let j = rng.random_range(0..=i);
        pairs.swap(i, j);
    }

    let cands = pairs
        .into_iter()
        .map(|(u, v)| {
            let sharp = rng.random_range(0.5..8.0f64);
            let raw: Vec<f64> = (0..a).map(|_| rng.random::<f64>().powf(sharp)).collect();
            let total: f64 = raw.iter().sum();
            let confs: Vec<(String, f64)> = labels.iter().cloned().zip(raw.iter().map(|x| x / total)).collect();
            let (h, t) = if rng.random_bool(0.5) { (u, v) } else { (v, u) };
            RawCandidate::new(format!("e{h}"), format!("e{t}"), confs)
        })
        .collect();
    ProbabilityGraph::build("", labels, ents, cands).unwrap()
}

/// Undirected random edge list on `n` nodes with about `m` edges.
pub fn random_edges(rng: &mut impl Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            (u, rng.random_range(0..n))
        })
        .collect()
}

pub fn k_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}
