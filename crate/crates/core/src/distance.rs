//! Central-concept selection and relational distances.
//!
//! Relational distance is the hop count between two entities when edge
//! direction is ignored. Distances are computed for all pairs with
//! Floyd–Warshall and then read off the initial node's row.

use thiserror::Error;

use crate::graph::ProbabilityGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown entity id {0:?}")]
pub struct UnknownEntity(pub String);

/// Hop counts from the initial node; `None` means unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    pub initial_node: usize,
    distance: Vec<Option<u32>>,
}

impl DistanceTable {
    pub fn get(&self, entity: usize) -> Option<u32> {
        self.distance[entity]
    }

    pub fn as_slice(&self) -> &[Option<u32>] {
        &self.distance
    }

    /// Largest finite distance in the table (0 when only the source is reachable).
    pub fn max_finite(&self) -> u32 {
        self.distance.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Whether both endpoints of an edge are within `depth` of the initial node.
    pub fn within(&self, head: usize, tail: usize, depth: u32) -> bool {
        matches!((self.distance[head], self.distance[tail]), (Some(a), Some(b)) if a <= depth && b <= depth)
    }
}

/// The entity filling the most quadruple endpoint slots.
///
/// Ties prefer the entity appearing earliest in the text, where entities with
/// a known token index come before those without; remaining ties fall back to
/// declaration order.
pub fn select_initial_node(graph: &ProbabilityGraph) -> usize {
    let counts = graph.occurrence_counts();
    let entities = graph.entities();
    (0..entities.len())
        .max_by(|&a, &b| {
            let key = |i: usize| entities[i].first_token_index.unwrap_or(usize::MAX);
            counts[a].cmp(&counts[b]).then_with(|| key(b).cmp(&key(a))).then_with(|| b.cmp(&a))
        })
        .expect("graph has at least one entity")
}

/// All-pairs unweighted shortest paths over undirected edges.
///
/// Parallel edges collapse into one; `result[i][j]` is `None` when `j` is not
/// reachable from `i`.
pub fn floyd_warshall(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<Option<u32>>> {
    const INF: u32 = u32::MAX;
    let mut d = vec![vec![INF; nodes]; nodes];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in edges {
        if u != v {
            d[u][v] = 1;
            d[v][u] = 1;
        }
    }
    for k in 0..nodes {
        let via = d[k].clone();
        for row in d.iter_mut() {
            let to_k = row[k];
            if to_k == INF {
                continue;
            }
            for (cell, &from_k) in row.iter_mut().zip(&via) {
                if from_k != INF && to_k + from_k < *cell {
                    *cell = to_k + from_k;
                }
            }
        }
    }
    d.into_iter().map(|row| row.into_iter().map(|x| (x != INF).then_some(x)).collect()).collect()
}

/// Relational distances from `source` to every entity of the graph.
///
/// Entities that take part in no quadruple are unreachable from every other
/// entity.
pub fn all_distances(graph: &ProbabilityGraph, source: usize) -> DistanceTable {
    assert!(source < graph.entities().len(), "source entity {source} out of range");
    let edges = graph.quadruples().iter().map(|q| (q.head, q.tail));
    let mut all = floyd_warshall(graph.entities().len(), edges);
    DistanceTable { initial_node: source, distance: all.swap_remove(source) }
}

/// Looks up `source_id` and computes its distance table.
pub fn distances_from_id(graph: &ProbabilityGraph, source_id: &str) -> Result<DistanceTable, UnknownEntity> {
    graph.entity_position(source_id).map(|s| all_distances(graph, s)).ok_or_else(|| UnknownEntity(source_id.to_owned()))
}
