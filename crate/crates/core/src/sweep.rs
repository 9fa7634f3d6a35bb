//! Compression sweeps: every strategy evaluated over a grid of `K` values,
//! the random baseline averaged over independently seeded runs.

use rayon::prelude::*;
use thiserror::Error;

use crate::distance::{all_distances, select_initial_node};
use crate::graph::ProbabilityGraph;
use crate::io::SweepRow;
use crate::metrics::{similarity, verbalize, MetricsError, MetricsReport};
use crate::selection::{quota, select_from_pool, CandidatePool, SelectionConfig, SelectionResult, Strategy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid K grid: {0}")]
    InvalidGrid(String),
    #[error("runs must be at least 1")]
    NoRuns,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl SweepError {
    pub fn code(&self) -> &'static str {
        match self {
            SweepError::InvalidGrid(_) => "invalid_grid",
            SweepError::NoRuns => "invalid_runs",
            SweepError::Metrics(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_from: f64,
    pub k_to: f64,
    pub k_step: f64,
    pub max_depth: u32,
    pub runs: usize,
    pub seed: u64,
    pub phi: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { k_from: 0.1, k_to: 1.0, k_step: 0.1, max_depth: 2, runs: 100, seed: 0, phi: 0.5 }
    }
}

/// One random-baseline run, kept for auditing the averaged rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub compression: f64,
    pub run: usize,
    pub semantic_uncertainty: f64,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub random_runs: Vec<RunRecord>,
}

/// `K_i = from + i * step` for every `K_i <= to`, snapped to 12 decimals.
pub fn compression_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, SweepError> {
    let finite = from.is_finite() && to.is_finite() && step.is_finite();
    if !finite || !(from > 0.0 && from <= to && to <= 1.0) {
        return Err(SweepError::InvalidGrid(format!("need 0 < k-from <= k-to <= 1, got {from}..{to}")));
    }
    if step <= 0.0 {
        return Err(SweepError::InvalidGrid(format!("k-step must be positive, got {step}")));
    }
    let points = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..points)
        .map(|i| {
            let k = from + i as f64 * step;
            ((k * 1e12).round() / 1e12).min(1.0)
        })
        .collect())
}

fn evaluate(graph: &ProbabilityGraph, result: &SelectionResult, phi: f64) -> Result<MetricsReport, MetricsError> {
    similarity(graph, result, &verbalize(result, graph), phi, false)
}

fn row_from(compression: f64, result: &SelectionResult, rep: &MetricsReport, runs: usize) -> SweepRow {
    SweepRow {
        compression,
        strategy: result.strategy,
        semantic_uncertainty: rep.semantic_uncertainty,
        similarity: rep.similarity,
        accuracy: rep.accuracy,
        completeness: rep.completeness,
        theta: rep.theta,
        quota: result.quota,
        effective_depth: result.effective_depth,
        runs_averaged: runs,
    }
}

/// Evaluates all six strategies at every grid point.
///
/// Grid points run in parallel on the current rayon pool; each random run
/// draws from its own generator stream, so the output is independent of the
/// thread count.
pub fn run_sweep(graph: &ProbabilityGraph, cfg: &SweepConfig) -> Result<SweepOutput, SweepError> {
    if cfg.runs == 0 {
        return Err(SweepError::NoRuns);
    }
    if !(0.0..=1.0).contains(&cfg.phi) {
        return Err(MetricsError::InvalidPhi(cfg.phi).into());
    }
    let grid = compression_grid(cfg.k_from, cfg.k_to, cfg.k_step)?;
    let distances = all_distances(graph, select_initial_node(graph));

    let per_point: Vec<(Vec<SweepRow>, Vec<RunRecord>)> = grid
        .par_iter()
        .map(|&k| {
            let h = quota(k, graph.len());
            let pool = CandidatePool::build(graph, &distances, cfg.max_depth, h);
            let mut rows = Vec::with_capacity(Strategy::ALL.len());
            let mut runs = Vec::new();
            for strategy in Strategy::ALL {
                let base = SelectionConfig::new(k, cfg.max_depth, strategy)
                    .expect("grid values lie in (0, 1]")
                    .with_seed(cfg.seed);
                if strategy != Strategy::Random {
                    let mut result = select_from_pool(graph, &base, &pool, h);
                    result.compression = Some(k);
                    rows.push(row_from(k, &result, &evaluate(graph, &result, cfg.phi)?, 1));
                    continue;
                }
                let mut mean = None::<(SelectionResult, MetricsReport)>;
                for run in 0..cfg.runs {
                    let result = select_from_pool(graph, &base.clone().with_run(run as u64), &pool, h);
                    let rep = evaluate(graph, &result, cfg.phi)?;
                    runs.push(RunRecord {
                        compression: k,
                        run,
                        semantic_uncertainty: rep.semantic_uncertainty,
                        similarity: rep.similarity,
                    });
                    mean = Some(match mean {
                        None => (result, rep),
                        Some((r0, mut acc)) => {
                            acc.semantic_uncertainty += rep.semantic_uncertainty;
                            acc.similarity += rep.similarity;
                            acc.accuracy += rep.accuracy;
                            acc.completeness += rep.completeness;
                            acc.theta += rep.theta;
                            (r0, acc)
                        }
                    });
                }
                let (result, mut acc) = mean.expect("at least one run");
                let n = cfg.runs as f64;
                acc.semantic_uncertainty /= n;
                acc.similarity /= n;
                acc.accuracy /= n;
                acc.completeness /= n;
                acc.theta /= n;
                rows.push(row_from(k, &result, &acc, cfg.runs));
            }
            Ok((rows, runs))
        })
        .collect::<Result<_, SweepError>>()?;

    let (mut rows, mut random_runs) = (Vec::new(), Vec::new());
    for (r, u) in per_point {
        rows.extend(r);
        random_runs.extend(u);
    }
    Ok(SweepOutput { rows, random_runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_ten_points() {
        let g = compression_grid(0.1, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[9], 1.0);
    }

    #[test]
    fn grid_validation() {
        assert!(compression_grid(0.0, 1.0, 0.1).is_err());
        assert!(compression_grid(0.5, 0.4, 0.1).is_err());
        assert!(compression_grid(0.1, 1.1, 0.1).is_err());
        assert!(compression_grid(0.1, 1.0, 0.0).is_err());
        assert!(compression_grid(0.1, 1.0, f64::NAN).is_err());
        assert_eq!(compression_grid(0.5, 0.5, 0.1).unwrap(), vec![0.5]);
        assert_eq!(compression_grid(0.25, 1.0, 0.25).unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
    }
}
