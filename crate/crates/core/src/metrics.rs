//! Evaluation of a selection: semantic uncertainty, entity-overlap accuracy
//! and completeness between original and recovered text, the confidence mass
//! `theta`, and the semantic similarity that combines them.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::ProbabilityGraph;
use crate::selection::{total_entropy, SelectionResult};

pub const DEFAULT_PHI: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("phi {0} outside [0, 1]")]
    InvalidPhi(f64),
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::InvalidPhi(_) => "invalid_phi",
        }
    }
}

/// Occurrences of one selected entity in both texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityCount {
    pub id: String,
    pub surface: String,
    pub original: usize,
    pub recovered: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub semantic_uncertainty: f64,
    pub accuracy: f64,
    pub completeness: f64,
    pub theta: f64,
    pub similarity: f64,
    pub phi: f64,
    pub entity_counts: Vec<EntityCount>,
}

/// Collapses whitespace runs to one space and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn prepare(text: &str, case_insensitive: bool) -> String {
    let t = normalize_whitespace(text);
    if case_insensitive {
        t.to_lowercase()
    } else {
        t
    }
}

/// Non-overlapping left-to-right matches of `surface` in `text`, after
/// whitespace normalization of both.
pub fn count_occurrences(text: &str, surface: &str, case_insensitive: bool) -> usize {
    count_prepared(&prepare(text, case_insensitive), &prepare(surface, case_insensitive))
}

fn count_prepared(text: &str, surface: &str) -> usize {
    if surface.is_empty() {
        return 0;
    }
    text.matches(surface).count()
}

pub fn semantic_uncertainty(result: &SelectionResult, graph: &ProbabilityGraph) -> f64 {
    total_entropy(graph, &result.selected)
}

/// Renders each selected quadruple as `"<head> <relation> <tail>."`, in
/// selection order, joined by single spaces.
pub fn verbalize(result: &SelectionResult, graph: &ProbabilityGraph) -> String {
    let ents = graph.entities();
    result
        .selected
        .iter()
        .map(|&i| {
            let q = &graph.quadruples()[i];
            format!("{} {} {}.", ents[q.head].surface, graph.relation_name(q), ents[q.tail].surface)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Distinct entities of the selected quadruples in first-appearance order.
pub fn selected_entities(graph: &ProbabilityGraph, selected: &[usize]) -> Vec<usize> {
    let mut seen = HashSet::new();
    selected
        .iter()
        .flat_map(|&i| {
            let q = &graph.quadruples()[i];
            [q.head, q.tail]
        })
        .filter(|e| seen.insert(*e))
        .collect()
}

/// Accuracy and completeness of `recovered` against `original`, restricted to
/// the selected entities.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlap {
    pub accuracy: f64,
    pub completeness: f64,
    pub counts: Vec<EntityCount>,
}

pub fn overlap(
    graph: &ProbabilityGraph,
    result: &SelectionResult,
    original: &str,
    recovered: &str,
    case_insensitive: bool,
) -> Overlap {
    let original_p = prepare(original, case_insensitive);
    let recovered_p = prepare(recovered, case_insensitive);
    let counts: Vec<EntityCount> = selected_entities(graph, &result.selected)
        .into_iter()
        .map(|e| {
            let ent = &graph.entities()[e];
            let surface = prepare(&ent.surface, case_insensitive);
            EntityCount {
                id: ent.id.clone(),
                surface: ent.surface.clone(),
                original: count_prepared(&original_p, &surface),
                recovered: count_prepared(&recovered_p, &surface),
            }
        })
        .collect();
    let shared: usize = counts.iter().map(|c| c.original.min(c.recovered)).sum();
    let in_recovered: usize = counts.iter().map(|c| c.recovered).sum();
    let in_original: usize = counts.iter().map(|c| c.original).sum();
    let ratio = |den: usize| if den == 0 { 0.0 } else { shared as f64 / den as f64 };
    Overlap { accuracy: ratio(in_recovered), completeness: ratio(in_original), counts }
}

pub fn accuracy(graph: &ProbabilityGraph, result: &SelectionResult, recovered: &str) -> f64 {
    overlap(graph, result, graph.text(), recovered, false).accuracy
}

pub fn completeness(graph: &ProbabilityGraph, result: &SelectionResult, recovered: &str) -> f64 {
    overlap(graph, result, graph.text(), recovered, false).completeness
}

/// Sum of each selected quadruple's largest relation probability, in
/// ascending order so the total does not depend on selection order.
pub fn theta(graph: &ProbabilityGraph, result: &SelectionResult) -> f64 {
    let mut ps: Vec<f64> = result.selected.iter().map(|&i| graph.quadruples()[i].top_probability).collect();
    ps.sort_by(f64::total_cmp);
    ps.into_iter().sum()
}

/// `theta * A * C / (phi * A + (1 - phi) * C)`, zero when the weighted
/// denominator vanishes.
pub fn similarity_score(theta: f64, accuracy: f64, completeness: f64, phi: f64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(MetricsError::InvalidPhi(phi));
    }
    let den = phi * accuracy + (1.0 - phi) * completeness;
    Ok(if den > 0.0 { theta * accuracy * completeness / den } else { 0.0 })
}

/// Full report for `result` with the graph's own text as the original.
pub fn similarity(
    graph: &ProbabilityGraph,
    result: &SelectionResult,
    recovered: &str,
    phi: f64,
    case_insensitive: bool,
) -> Result<MetricsReport, MetricsError> {
    report_against(graph, result, graph.text(), recovered, phi, case_insensitive)
}

pub fn report_against(
    graph: &ProbabilityGraph,
    result: &SelectionResult,
    original: &str,
    recovered: &str,
    phi: f64,
    case_insensitive: bool,
) -> Result<MetricsReport, MetricsError> {
    let ov = overlap(graph, result, original, recovered, case_insensitive);
    let theta = theta(graph, result);
    let similarity = similarity_score(theta, ov.accuracy, ov.completeness, phi)?;
    Ok(MetricsReport {
        semantic_uncertainty: semantic_uncertainty(result, graph),
        accuracy: ov.accuracy,
        completeness: ov.completeness,
        theta,
        similarity,
        phi,
        entity_counts: ov.counts,
    })
}
