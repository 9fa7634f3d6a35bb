//! Probability graphs: knowledge graphs whose edges carry a confidence
//! distribution over a fixed relation set instead of a single relation.
//!
//! Every extracted entity pair becomes a [`Quadruple`]: head, argmax relation,
//! tail and the Shannon entropy (in bits) of the pair's relation distribution.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Lower/upper bound on the raw confidence sum accepted at ingestion.
pub const SUM_BAND: (f64, f64) = (0.9, 1.1);

/// Drift from 1 above which a renormalization is reported as a warning.
const WARN_DRIFT: f64 = 1e-6;

/// Drift from 1 above which confidences are rescaled at all. Below this the
/// input is kept bit-for-bit so re-ingesting a serialized graph is exact.
const RESCALE_DRIFT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("relation label {0:?} is empty or has surrounding whitespace")]
    BadLabel(String),
    #[error("relation label {0:?} declared twice")]
    DuplicateLabel(String),
    #[error("relation set needs at least 2 labels, got {0}")]
    RelationSetTooSmall(usize),
    #[error("entity {0:?} has an empty id or surface")]
    BadEntity(String),
    #[error("entity id {0:?} declared twice")]
    DuplicateEntity(String),
    #[error("candidate {candidate}: unknown entity id {id:?}")]
    UnknownEntity { candidate: usize, id: String },
    #[error("candidate {candidate}: unknown relation label {label:?}")]
    UnknownRelation { candidate: usize, label: String },
    #[error("candidate {candidate}: head and tail are both {id:?}")]
    SelfLoop { candidate: usize, id: String },
    #[error("candidate {candidate}: {reason}")]
    BadDistribution { candidate: usize, reason: String },
    #[error("graph has no candidates")]
    EmptyGraph,
}

impl GraphError {
    /// Stable snake_case identifier for machine-readable diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::BadLabel(_) => "bad_label",
            GraphError::DuplicateLabel(_) => "duplicate_label",
            GraphError::RelationSetTooSmall(_) => "relation_set_too_small",
            GraphError::BadEntity(_) => "bad_entity",
            GraphError::DuplicateEntity(_) => "duplicate_entity",
            GraphError::UnknownEntity { .. } => "unknown_entity",
            GraphError::UnknownRelation { .. } => "unknown_relation",
            GraphError::SelfLoop { .. } => "self_loop",
            GraphError::BadDistribution { .. } => "bad_distribution",
            GraphError::EmptyGraph => "empty_graph",
        }
    }
}

/// A relation name from the extractor's fixed relation set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationLabel(String);

impl RelationLabel {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if name.is_empty() || name.trim() != name {
            return Err(GraphError::BadLabel(name));
        }
        Ok(RelationLabel(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shannon entropy in bits, with `0 * log2(0) = 0`.
pub fn relation_entropy(probabilities: &[f64]) -> f64 {
    let h: f64 = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    // -0.0 for one-hot inputs
    h.max(0.0)
}

/// Confidences for one entity pair, dense and aligned with the graph's
/// relation-set order.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationDistribution(Vec<f64>);

impl RelationDistribution {
    /// Validates raw extractor confidences and renormalizes them to sum to 1.
    ///
    /// Returns the distribution and, if the raw sum drifted noticeably from 1,
    /// that raw sum so the caller can record a warning.
    pub fn normalize(raw: Vec<f64>) -> Result<(Self, Option<f64>), String> {
        if let Some(bad) = raw.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(format!("confidence {bad} outside [0, 1]"));
        }
        let sum: f64 = raw.iter().sum();
        if !(SUM_BAND.0..=SUM_BAND.1).contains(&sum) {
            return Err(format!("confidences sum to {sum}, outside [{}, {}]", SUM_BAND.0, SUM_BAND.1));
        }
        let drift = (sum - 1.0).abs();
        let probs = if drift > RESCALE_DRIFT { raw.into_iter().map(|p| p / sum).collect() } else { raw };
        Ok((RelationDistribution(probs), (drift > WARN_DRIFT).then_some(sum)))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn entropy(&self) -> f64 {
        relation_entropy(&self.0)
    }

    /// Index and value of the largest confidence; ties go to the lowest index.
    pub fn argmax(&self) -> (usize, f64) {
        self.0
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if p > best.1 { (i, p) } else { best })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: String,
    pub surface: String,
    /// Position of the first occurrence in the token sequence, if known.
    pub first_token_index: Option<usize>,
}

impl Entity {
    pub fn new(id: impl Into<String>, surface: impl Into<String>) -> Self {
        Entity { id: id.into(), surface: surface.into(), first_token_index: None }
    }

    pub fn at_token(mut self, index: usize) -> Self {
        self.first_token_index = Some(index);
        self
    }
}

/// `(head, relation, tail, entropy)` with the full distribution retained.
///
/// `head` and `tail` index into [`ProbabilityGraph::entities`].
#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub head: usize,
    pub tail: usize,
    pub distribution: RelationDistribution,
    /// Index into the relation set of the most confident relation.
    pub top_relation: usize,
    pub top_probability: f64,
    pub entropy: f64,
}

/// Extractor output for one entity pair before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCandidate {
    pub head: String,
    pub tail: String,
    /// Sparse confidences keyed by relation label; missing labels are zero.
    pub confidences: Vec<(String, f64)>,
}

impl RawCandidate {
    pub fn new<L: Into<String>>(
        head: impl Into<String>,
        tail: impl Into<String>,
        confidences: impl IntoIterator<Item = (L, f64)>,
    ) -> Self {
        RawCandidate {
            head: head.into(),
            tail: tail.into(),
            confidences: confidences.into_iter().map(|(l, p)| (l.into(), p)).collect(),
        }
    }
}

/// Non-fatal issue noticed while building a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestWarning {
    pub candidate: usize,
    pub raw_sum: f64,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "candidate {}: confidences summed to {}, renormalized", self.candidate, self.raw_sum)
    }
}

/// Ordered set of quadruples extracted from one text.
#[derive(Debug, Clone)]
pub struct ProbabilityGraph {
    text: String,
    relation_set: Vec<RelationLabel>,
    entities: Vec<Entity>,
    quadruples: Vec<Quadruple>,
    warnings: Vec<IngestWarning>,
}

/// Warnings are ingestion history, not graph content, so they take no part
/// in equality.
impl PartialEq for ProbabilityGraph {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
            && self.relation_set == other.relation_set
            && self.entities == other.entities
            && self.quadruples == other.quadruples
    }
}

impl ProbabilityGraph {
    /// Validates extractor output and assembles quadruples in input order.
    pub fn build(
        text: impl Into<String>,
        relation_set: Vec<String>,
        entities: Vec<Entity>,
        candidates: Vec<RawCandidate>,
    ) -> Result<Self, GraphError> {
        if relation_set.len() < 2 {
            return Err(GraphError::RelationSetTooSmall(relation_set.len()));
        }
        let mut label_index = HashMap::new();
        let mut labels = Vec::with_capacity(relation_set.len());
        for name in relation_set {
            let label = RelationLabel::new(name)?;
            if label_index.insert(label.0.clone(), labels.len()).is_some() {
                return Err(GraphError::DuplicateLabel(label.0));
            }
            labels.push(label);
        }

        let mut entity_index = HashMap::new();
        for (i, e) in entities.iter().enumerate() {
            if e.id.is_empty() || e.surface.trim().is_empty() {
                return Err(GraphError::BadEntity(e.id.clone()));
            }
            if entity_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateEntity(e.id.clone()));
            }
        }

        if candidates.is_empty() {
            return Err(GraphError::EmptyGraph);
        }

        let mut warnings = Vec::new();
        let mut quadruples = Vec::with_capacity(candidates.len());
        for (ci, cand) in candidates.into_iter().enumerate() {
            let resolve = |id: &str| {
                entity_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownEntity { candidate: ci, id: id.to_owned() })
            };
            let head = resolve(&cand.head)?;
            let tail = resolve(&cand.tail)?;
            if head == tail {
                return Err(GraphError::SelfLoop { candidate: ci, id: cand.head });
            }

            let mut dense = vec![0.0; labels.len()];
            for (label, p) in cand.confidences {
                let slot = *label_index.get(&label).ok_or(GraphError::UnknownRelation { candidate: ci, label })?;
                dense[slot] = p;
            }
            let (distribution, drifted) = RelationDistribution::normalize(dense)
                .map_err(|reason| GraphError::BadDistribution { candidate: ci, reason })?;
            if let Some(raw_sum) = drifted {
                warnings.push(IngestWarning { candidate: ci, raw_sum });
            }
            let (top_relation, top_probability) = distribution.argmax();
            let entropy = distribution.entropy();
            quadruples.push(Quadruple { head, tail, distribution, top_relation, top_probability, entropy });
        }

        Ok(ProbabilityGraph { text: text.into(), relation_set: labels, entities, quadruples, warnings })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn relation_set(&self) -> &[RelationLabel] {
        &self.relation_set
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn quadruples(&self) -> &[Quadruple] {
        &self.quadruples
    }

    pub fn warnings(&self) -> &[IngestWarning] {
        &self.warnings
    }

    /// Number of quadruples, `G`.
    pub fn len(&self) -> usize {
        self.quadruples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quadruples.is_empty()
    }

    pub fn entity_position(&self, id: &str) -> Option<usize> {
        self.entities.iter().position(|e| e.id == id)
    }

    pub fn relation_name(&self, q: &Quadruple) -> &str {
        self.relation_set[q.top_relation].as_str()
    }

    /// How many quadruple endpoint slots each entity fills.
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.entities.len()];
        for q in &self.quadruples {
            counts[q.head] += 1;
            counts[q.tail] += 1;
        }
        counts
    }
}

/// Splits text into word and punctuation tokens.
///
/// `"Apple is a kind of fruit."` yields 7 tokens with `"."` last.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let mut start = 0;
        for (i, c) in word.char_indices() {
            if c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' {
                continue;
            }
            if start < i {
                tokens.push(&word[start..i]);
            }
            tokens.push(&word[i..i + c.len_utf8()]);
            start = i + c.len_utf8();
        }
        if start < word.len() {
            tokens.push(&word[start..]);
        }
    }
    tokens
}
