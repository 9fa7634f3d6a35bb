//! Interchange formats: graph documents (JSON), selection and metrics
//! documents (JSON), and sweep tables (CSV).

use std::collections::HashSet;
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Entity, GraphError, ProbabilityGraph, RawCandidate};
use crate::metrics::MetricsReport;
use crate::selection::{total_entropy, SelectionResult, Strategy};

pub const SCHEMA_VERSION: u32 = 1;

pub const SWEEP_HEADER: &str = "K,strategy,SU,SS,A,C,theta,H,effective_depth,runs_averaged";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("selection does not match graph: {0}")]
    SelectionMismatch(String),
}

impl DocumentError {
    pub fn code(&self) -> &'static str {
        match self {
            DocumentError::Malformed(_) => "malformed_document",
            DocumentError::SchemaViolation(_) => "schema_violation",
            DocumentError::Graph(e) => e.code(),
            DocumentError::SelectionMismatch(_) => "selection_mismatch",
        }
    }
}

fn classify(e: serde_json::Error) -> DocumentError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => DocumentError::SchemaViolation(e.to_string()),
        Category::Syntax | Category::Eof | Category::Io => DocumentError::Malformed(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub schema_version: u32,
    pub text: String,
    pub relation_set: Vec<String>,
    pub entities: Vec<EntityRecord>,
    pub candidates: Vec<CandidateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityRecord {
    pub id: String,
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_token_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateRecord {
    pub head: String,
    pub tail: String,
    /// Sparse: labels left out have confidence zero.
    pub confidences: IndexMap<String, f64>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<ProbabilityGraph, DocumentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocumentError::SchemaViolation(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let entities = self
            .entities
            .into_iter()
            .map(|e| Entity { id: e.id, surface: e.surface, first_token_index: e.first_token_index })
            .collect();
        let candidates =
            self.candidates.into_iter().map(|c| RawCandidate::new(c.head, c.tail, c.confidences)).collect();
        Ok(ProbabilityGraph::build(self.text, self.relation_set, entities, candidates)?)
    }

    pub fn from_graph(graph: &ProbabilityGraph) -> Self {
        let ents = graph.entities();
        let labels = graph.relation_set();
        GraphDocument {
            schema_version: SCHEMA_VERSION,
            text: graph.text().to_owned(),
            relation_set: labels.iter().map(|l| l.as_str().to_owned()).collect(),
            entities: ents
                .iter()
                .map(|e| EntityRecord {
                    id: e.id.clone(),
                    surface: e.surface.clone(),
                    first_token_index: e.first_token_index,
                })
                .collect(),
            candidates: graph
                .quadruples()
                .iter()
                .map(|q| CandidateRecord {
                    head: ents[q.head].id.clone(),
                    tail: ents[q.tail].id.clone(),
                    confidences: labels
                        .iter()
                        .zip(q.distribution.probabilities())
                        .filter(|(_, &p)| p != 0.0)
                        .map(|(l, &p)| (l.as_str().to_owned(), p))
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_graph_document(bytes: &[u8]) -> Result<ProbabilityGraph, DocumentError> {
    let doc: GraphDocument = serde_json::from_slice(bytes).map_err(classify)?;
    doc.into_graph()
}

pub fn emit_graph_document(graph: &ProbabilityGraph) -> Vec<u8> {
    to_pretty(&GraphDocument::from_graph(graph))
}

fn to_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("documents always serialize");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionDocument {
    pub strategy: String,
    #[serde(rename = "K")]
    pub compression: Option<f64>,
    pub max_depth: u32,
    pub seed: Option<u64>,
    #[serde(rename = "H")]
    pub quota: usize,
    pub effective_depth: u32,
    pub relaxation_steps: u32,
    pub disconnected_fallback: bool,
    pub semantic_uncertainty: f64,
    pub selected: Vec<SelectedRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectedRecord {
    pub index: usize,
    pub head: String,
    pub relation: String,
    pub tail: String,
    pub top_probability: f64,
    pub entropy: f64,
}

pub fn emit_selection(result: &SelectionResult, graph: &ProbabilityGraph) -> Vec<u8> {
    let ents = graph.entities();
    let doc = SelectionDocument {
        strategy: result.strategy.name().to_owned(),
        compression: result.compression,
        max_depth: result.max_depth,
        seed: result.seed,
        quota: result.quota,
        effective_depth: result.effective_depth,
        relaxation_steps: result.relaxation_steps,
        disconnected_fallback: result.disconnected_fallback,
        semantic_uncertainty: result.semantic_uncertainty,
        selected: result
            .selected
            .iter()
            .map(|&i| {
                let q = &graph.quadruples()[i];
                SelectedRecord {
                    index: i,
                    head: ents[q.head].surface.clone(),
                    relation: graph.relation_name(q).to_owned(),
                    tail: ents[q.tail].surface.clone(),
                    top_probability: q.top_probability,
                    entropy: q.entropy,
                }
            })
            .collect(),
    };
    to_pretty(&doc)
}

/// Reads a selection document and checks it against the graph it claims to
/// select from.
pub fn parse_selection(bytes: &[u8], graph: &ProbabilityGraph) -> Result<SelectionResult, DocumentError> {
    let doc: SelectionDocument = serde_json::from_slice(bytes).map_err(classify)?;
    let strategy: Strategy = doc.strategy.parse().map_err(|e| DocumentError::SchemaViolation(format!("{e}")))?;
    let mismatch = |m: String| Err(DocumentError::SelectionMismatch(m));
    if doc.quota != doc.selected.len() {
        return mismatch(format!("H = {} but {} quadruples listed", doc.quota, doc.selected.len()));
    }
    let mut seen = HashSet::new();
    let ents = graph.entities();
    for rec in &doc.selected {
        let Some(q) = graph.quadruples().get(rec.index) else {
            return mismatch(format!("index {} out of range for {} quadruples", rec.index, graph.len()));
        };
        if !seen.insert(rec.index) {
            return mismatch(format!("index {} listed twice", rec.index));
        }
        if ents[q.head].surface != rec.head
            || ents[q.tail].surface != rec.tail
            || graph.relation_name(q) != rec.relation
        {
            return mismatch(format!(
                "index {}: ({}, {}, {}) differs from graph quadruple ({}, {}, {})",
                rec.index,
                rec.head,
                rec.relation,
                rec.tail,
                ents[q.head].surface,
                graph.relation_name(q),
                ents[q.tail].surface
            ));
        }
    }
    let selected: Vec<usize> = doc.selected.iter().map(|r| r.index).collect();
    let su = total_entropy(graph, &selected);
    if (su - doc.semantic_uncertainty).abs() > 1e-9 {
        return mismatch(format!("semantic_uncertainty {} but graph entropies sum to {su}", doc.semantic_uncertainty));
    }
    Ok(SelectionResult {
        strategy,
        compression: doc.compression,
        max_depth: doc.max_depth,
        seed: doc.seed,
        selected,
        quota: doc.quota,
        effective_depth: doc.effective_depth,
        relaxation_steps: doc.relaxation_steps,
        disconnected_fallback: doc.disconnected_fallback,
        semantic_uncertainty: doc.semantic_uncertainty,
    })
}

pub fn emit_metrics(report: &MetricsReport) -> Vec<u8> {
    to_pretty(report)
}

/// One `(K, strategy)` point of a compression sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub compression: f64,
    pub strategy: Strategy,
    pub semantic_uncertainty: f64,
    pub similarity: f64,
    pub accuracy: f64,
    pub completeness: f64,
    pub theta: f64,
    pub quota: usize,
    pub effective_depth: u32,
    pub runs_averaged: usize,
}

/// CSV with a fixed header, rows ordered by strategy then `K`, reals at 9
/// significant digits.
pub fn emit_sweep_table(rows: &[SweepRow]) -> Vec<u8> {
    let mut sorted: Vec<&SweepRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.strategy.cmp(&b.strategy).then(a.compression.total_cmp(&b.compression)));
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            format_significant(r.compression, 9),
            r.strategy,
            format_significant(r.semantic_uncertainty, 9),
            format_significant(r.similarity, 9),
            format_significant(r.accuracy, 9),
            format_significant(r.completeness, 9),
            format_significant(r.theta, 9),
            r.quota,
            r.effective_depth,
            r.runs_averaged,
        );
    }
    out.into_bytes()
}

/// `%g`-style rendering with `digits` significant digits and trailing zeros
/// removed. Never locale dependent.
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_fraction(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
