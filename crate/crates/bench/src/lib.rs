//! Synthetic probability graphs for benchmarking.

use kgsqueeze::{Entity, ProbabilityGraph, RawCandidate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A connected graph with `entities` nodes, `quadruples` candidates and
/// `relations` labels, reproducible from `seed`.
pub fn synthetic_graph(seed: u64, entities: usize, quadruples: usize, relations: usize) -> ProbabilityGraph {
    assert!(entities >= 2 && quadruples + 1 >= entities && relations >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..relations).map(|i| format!("rel{i}")).collect();
    let ents = (0..entities).map(|i| Entity::new(format!("e{i}"), format!("Entity {i}")).at_token(i)).collect();

    let mut pairs: Vec<(usize, usize)> = (1..entities).map(|i| (rng.random_range(0..i), i)).collect();
    while pairs.len() < quadruples {
        let u = rng.random_range(0..entities);
        pairs.push((u, (u + rng.random_range(1..entities)) % entities));
    }
    let cands = pairs
        .into_iter()
        .map(|(h, t)| {
            let raw: Vec<f64> = (0..relations).map(|_| rng.random::<f64>().powi(4)).collect();
            let total: f64 = raw.iter().sum();
            let confs: Vec<(String, f64)> = labels.iter().cloned().zip(raw.into_iter().map(|x| x / total)).collect();
            RawCandidate::new(format!("e{h}"), format!("e{t}"), confs)
        })
        .collect();
    ProbabilityGraph::build("", labels, ents, cands).expect("synthetic graph is valid")
}
