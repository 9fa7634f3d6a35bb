//! Minimum-entropy quadruple selection under a quota and a depth limit.
//!
//! Given a compression coefficient `K` and a maximum depth `D`, the proposed
//! strategy keeps the `H = quota(K, G)` lowest-entropy quadruples whose
//! endpoints both lie within `D` hops of the initial node. When fewer than `H`
//! quadruples qualify, `D` is raised one hop at a time. If the initial node's
//! component is exhausted and the quota is still not met, quadruples touching
//! unreachable entities are admitted as a second tier and the result is
//! flagged.
//!
//! The baselines draw from the same tiers and differ only in how they order
//! candidates inside a tier.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::distance::{all_distances, select_initial_node, DistanceTable};
use crate::graph::ProbabilityGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectionError {
    #[error("compression coefficient {0} outside (0, 1]")]
    InvalidCompression(f64),
    #[error("graph has no quadruples")]
    EmptyGraph,
    #[error("random strategy needs a seed")]
    MissingSeed,
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("invalid channel budget: {0}")]
    InvalidBudget(String),
}

impl SelectionError {
    pub fn code(&self) -> &'static str {
        match self {
            SelectionError::InvalidCompression(_) => "invalid_compression",
            SelectionError::EmptyGraph => "empty_graph",
            SelectionError::MissingSeed => "missing_seed",
            SelectionError::UnknownStrategy(_) => "unknown_strategy",
            SelectionError::InvalidBudget(_) => "invalid_budget",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Proposed,
    Random,
    EntityFreqDesc,
    EntityFreqAsc,
    OrderFront,
    OrderBack,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Proposed,
        Strategy::Random,
        Strategy::EntityFreqDesc,
        Strategy::EntityFreqAsc,
        Strategy::OrderFront,
        Strategy::OrderBack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Proposed => "proposed",
            Strategy::Random => "random",
            Strategy::EntityFreqDesc => "entity_freq_desc",
            Strategy::EntityFreqAsc => "entity_freq_asc",
            Strategy::OrderFront => "order_front",
            Strategy::OrderBack => "order_back",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = SelectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| SelectionError::UnknownStrategy(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    compression: f64,
    pub max_depth: u32,
    pub strategy: Strategy,
    pub seed: Option<u64>,
    /// Stream of the seeded generator, so repeated random runs are independent.
    pub run_index: u64,
}

impl SelectionConfig {
    pub fn new(compression: f64, max_depth: u32, strategy: Strategy) -> Result<Self, SelectionError> {
        if !(compression > 0.0 && compression <= 1.0) {
            return Err(SelectionError::InvalidCompression(compression));
        }
        Ok(SelectionConfig { compression, max_depth, strategy, seed: None, run_index: 0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_run(mut self, run_index: u64) -> Self {
        self.run_index = run_index;
        self
    }

    pub fn compression(&self) -> f64 {
        self.compression
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub strategy: Strategy,
    /// `None` when the quota came from a channel budget rather than `K`.
    pub compression: Option<f64>,
    pub max_depth: u32,
    pub seed: Option<u64>,
    /// Quadruple indices in selection order.
    pub selected: Vec<usize>,
    /// The quota `H`; equals `selected.len()`.
    pub quota: usize,
    pub effective_depth: u32,
    pub relaxation_steps: u32,
    /// Set when quadruples outside the initial node's component were needed.
    pub disconnected_fallback: bool,
    pub semantic_uncertainty: f64,
}

/// `H = clamp(round_half_up(K * G), 1, G)`.
pub fn quota(compression: f64, total: usize) -> usize {
    assert!(total >= 1, "quota of an empty graph");
    // absorbs representation error in K such as 0.7 * 5 = 3.4999999999999996
    let h = (compression * total as f64 + 0.5 + 1e-9).floor();
    (h.max(1.0) as usize).min(total)
}

/// Transmission resources for one graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBudget {
    pub time: f64,
    pub bandwidth: f64,
    pub power: f64,
    pub gain: f64,
    pub noise: f64,
    pub bits_per_quadruple: u64,
}

impl ChannelBudget {
    pub fn new(
        time: f64,
        bandwidth: f64,
        power: f64,
        gain: f64,
        noise: f64,
        bits_per_quadruple: u64,
    ) -> Result<Self, SelectionError> {
        let fields = [("time", time), ("bandwidth", bandwidth), ("power", power), ("gain", gain), ("noise", noise)];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(SelectionError::InvalidBudget(format!("{name} is not finite")));
            }
            if v < 0.0 {
                return Err(SelectionError::InvalidBudget(format!("{name} is negative")));
            }
        }
        if noise <= 0.0 {
            return Err(SelectionError::InvalidBudget("noise power must be positive".into()));
        }
        if bits_per_quadruple == 0 {
            return Err(SelectionError::InvalidBudget("bits per quadruple must be at least 1".into()));
        }
        Ok(ChannelBudget { time, bandwidth, power, gain, noise, bits_per_quadruple })
    }

    /// `t * B * log2(1 + P * h / noise)` in bits.
    pub fn capacity_bits(&self) -> f64 {
        self.time * self.bandwidth * (1.0 + self.power * self.gain / self.noise).log2()
    }
}

/// Whole quadruples the channel can carry, capped at the graph size.
pub fn budget_to_quota(budget: &ChannelBudget, total: usize) -> usize {
    let raw = budget.capacity_bits() / budget.bits_per_quadruple as f64;
    let h = (raw + raw.abs() * 1e-12).floor();
    if h >= total as f64 {
        total
    } else {
        h.max(0.0) as usize
    }
}

/// Quadruples whose head and tail are both within `depth` hops, in input order.
pub fn eligible(graph: &ProbabilityGraph, distances: &DistanceTable, depth: u32) -> Vec<usize> {
    graph
        .quadruples()
        .iter()
        .enumerate()
        .filter(|(_, q)| distances.within(q.head, q.tail, depth))
        .map(|(i, _)| i)
        .collect()
}

/// Candidate tiers shared by every strategy for one `(graph, D, H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePool {
    /// Quadruples satisfying the (possibly relaxed) depth limit, input order.
    pub eligible: Vec<usize>,
    /// Remaining quadruples, input order; only drawn from when `eligible` is short.
    pub overflow: Vec<usize>,
    pub effective_depth: u32,
}

impl CandidatePool {
    pub fn build(graph: &ProbabilityGraph, distances: &DistanceTable, max_depth: u32, quota: usize) -> Self {
        let ceiling = distances.max_finite();
        let mut depth = max_depth;
        let mut elig = eligible(graph, distances, depth);
        while elig.len() < quota && depth < ceiling {
            depth += 1;
            elig = eligible(graph, distances, depth);
        }
        let overflow = if elig.len() < quota {
            (0..graph.len()).filter(|i| elig.binary_search(i).is_err()).collect()
        } else {
            Vec::new()
        };
        CandidatePool { eligible: elig, overflow, effective_depth: depth }
    }

    pub fn needs_fallback(&self, quota: usize) -> bool {
        self.eligible.len() < quota
    }
}

/// Semantic uncertainty of `indices`: the sum of their entropies.
///
/// Terms are added in ascending value order so that elementwise-smaller
/// selections never round to a larger total.
pub fn total_entropy(graph: &ProbabilityGraph, indices: &[usize]) -> f64 {
    let mut hs: Vec<f64> = indices.iter().map(|&i| graph.quadruples()[i].entropy).collect();
    hs.sort_by(f64::total_cmp);
    hs.into_iter().sum()
}

/// Runs whichever strategy `config` names with `H = quota(K, G)`.
pub fn select(graph: &ProbabilityGraph, config: &SelectionConfig) -> Result<SelectionResult, SelectionError> {
    if graph.is_empty() {
        return Err(SelectionError::EmptyGraph);
    }
    let h = quota(config.compression, graph.len());
    let mut result = select_with_quota(graph, config, h)?;
    result.compression = Some(config.compression);
    Ok(result)
}

pub fn select_proposed(graph: &ProbabilityGraph, config: &SelectionConfig) -> Result<SelectionResult, SelectionError> {
    debug_assert_eq!(config.strategy, Strategy::Proposed);
    select(graph, config)
}

pub fn select_baseline(graph: &ProbabilityGraph, config: &SelectionConfig) -> Result<SelectionResult, SelectionError> {
    debug_assert_ne!(config.strategy, Strategy::Proposed);
    select(graph, config)
}

/// Runs the configured strategy for an explicit quota, which may be zero
/// (for instance when a channel budget carries nothing).
pub fn select_with_quota(
    graph: &ProbabilityGraph,
    config: &SelectionConfig,
    quota: usize,
) -> Result<SelectionResult, SelectionError> {
    if graph.is_empty() {
        return Err(SelectionError::EmptyGraph);
    }
    if config.strategy == Strategy::Random && config.seed.is_none() {
        return Err(SelectionError::MissingSeed);
    }
    let quota = quota.min(graph.len());
    let distances = all_distances(graph, select_initial_node(graph));
    let pool = CandidatePool::build(graph, &distances, config.max_depth, quota);
    Ok(select_from_pool(graph, config, &pool, quota))
}

/// Picks `quota` quadruples from a prepared pool. Reusing one pool across
/// strategies and runs avoids recomputing distances in sweeps.
pub fn select_from_pool(
    graph: &ProbabilityGraph,
    config: &SelectionConfig,
    pool: &CandidatePool,
    quota: usize,
) -> SelectionResult {
    let fallback = pool.needs_fallback(quota);
    let mut selected = if fallback {
        let mut all = order_tier(graph, config, &pool.eligible, pool.eligible.len());
        all.extend(order_tier(graph, config, &pool.overflow, quota - pool.eligible.len()));
        all
    } else {
        order_tier(graph, config, &pool.eligible, quota)
    };
    selected.truncate(quota);
    let semantic_uncertainty = total_entropy(graph, &selected);
    SelectionResult {
        strategy: config.strategy,
        compression: None,
        max_depth: config.max_depth,
        seed: config.seed.filter(|_| config.strategy == Strategy::Random),
        quota: selected.len(),
        selected,
        effective_depth: pool.effective_depth,
        relaxation_steps: pool.effective_depth.saturating_sub(config.max_depth),
        disconnected_fallback: fallback,
        semantic_uncertainty,
    }
}

/// Seeded generator for run `run_index`; each run reads its own ChaCha stream.
pub fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// First `take` members of `tier` in the strategy's preference order.
fn order_tier(graph: &ProbabilityGraph, config: &SelectionConfig, tier: &[usize], take: usize) -> Vec<usize> {
    let quads = graph.quadruples();
    let take = take.min(tier.len());
    match config.strategy {
        Strategy::Proposed => {
            let mut v = tier.to_vec();
            v.sort_by(|&a, &b| quads[a].entropy.total_cmp(&quads[b].entropy));
            v.truncate(take);
            v
        }
        Strategy::Random => {
            let seed = config.seed.expect("checked by caller");
            let mut rng = run_rng(seed, config.run_index);
            let mut picked: Vec<usize> =
                index::sample(&mut rng, tier.len(), take).into_iter().map(|i| tier[i]).collect();
            picked.sort_unstable();
            picked
        }
        Strategy::EntityFreqDesc | Strategy::EntityFreqAsc => {
            let occ = graph.occurrence_counts();
            let score = |i: usize| occ[quads[i].head] + occ[quads[i].tail];
            let mut v = tier.to_vec();
            if config.strategy == Strategy::EntityFreqDesc {
                v.sort_by_key(|&i| std::cmp::Reverse(score(i)));
            } else {
                v.sort_by_key(|&i| score(i));
            }
            v.truncate(take);
            v
        }
        Strategy::OrderFront => tier[..take].to_vec(),
        Strategy::OrderBack => tier[tier.len() - take..].to_vec(),
    }
}
