//! Compression of probability graphs by minimum-entropy quadruple selection.
//!
//! A probability graph is a knowledge graph in which every extracted entity
//! pair carries a confidence distribution over a fixed relation set. This
//! crate turns those distributions into `(head, relation, tail, entropy)`
//! quadruples, picks the most certain subset that fits a quota while staying
//! close to the graph's central entity, and scores the result with semantic
//! uncertainty and semantic similarity.
//!
//! ```
//! use kgsqueeze::{Entity, ProbabilityGraph, RawCandidate, SelectionConfig, Strategy};
//!
//! let graph = ProbabilityGraph::build(
//!     "Apple is a kind of fruit.",
//!     vec!["is_a".into(), "part_of".into()],
//!     vec![Entity::new("apple", "Apple"), Entity::new("fruit", "fruit")],
//!     vec![RawCandidate::new("apple", "fruit", [("is_a", 0.9), ("part_of", 0.1)])],
//! )
//! .unwrap();
//! let config = SelectionConfig::new(1.0, 2, Strategy::Proposed).unwrap();
//! let result = kgsqueeze::select(&graph, &config).unwrap();
//! assert_eq!(result.selected, vec![0]);
//! ```

pub mod distance;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod selection;
pub mod sweep;

pub use distance::{all_distances, floyd_warshall, select_initial_node, DistanceTable};
pub use graph::{
    relation_entropy, Entity, GraphError, ProbabilityGraph, Quadruple, RawCandidate, RelationDistribution,
};
pub use io::{emit_selection, emit_sweep_table, parse_graph_document, DocumentError, SweepRow};
pub use metrics::{MetricsError, MetricsReport};
pub use selection::{
    budget_to_quota, quota, select, ChannelBudget, SelectionConfig, SelectionError, SelectionResult, Strategy,
};
pub use sweep::{run_sweep, SweepConfig, SweepError, SweepOutput};
