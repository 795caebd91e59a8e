//! Exhaustive simplex grid search for linear-fusion weights.
//!
//! Rank metrics are piecewise constant in the weights, so the search simply
//! evaluates every point of the lattice `{w : w_n = m_n * step, sum w_n = 1}`.
//! Restricting to the simplex loses nothing: scaling all weights by a
//! positive constant does not change the fused order.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::fusion::score::{backfilled_scores, linear_inputs, weighted_sum};
use crate::fusion::{ranked_order, Candidates, FusionConfig, FusionMethod};
use crate::metrics::{MetricSpec, QueryJudgments};
use crate::qrels::Qrels;
use crate::run::{RankedList, Run};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    step: f64,
    divisions: usize,
    pub objective: MetricSpec,
}

impl GridSpec {
    /// `1 / step` must be a positive integer (within 1e-9).
    pub fn new(step: f64, objective: MetricSpec) -> Result<Self> {
        if !(step.is_finite() && step > 0.0 && step <= 1.0) {
            return Err(Error::InvalidGrid("step must lie in (0, 1]"));
        }
        let inverse = 1.0 / step;
        let divisions = libm::round(inverse);
        if (inverse - divisions).abs() > 1e-9 {
            return Err(Error::InvalidGrid("1/step must be an integer"));
        }
        Ok(Self {
            step,
            divisions: divisions as usize,
            objective,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `1 / step`.
    pub fn divisions(&self) -> usize {
        self.divisions
    }
}

/// Integer compositions `m` of `divisions` into `parts` non-negative parts,
/// in lexicographic order. Weights are `m_n / divisions`.
pub fn lattice(parts: usize, divisions: usize) -> Vec<Vec<usize>> {
    fn fill(prefix: &mut Vec<usize>, parts: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == parts {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for m in 0..=left {
            prefix.push(m);
            fill(prefix, parts, left - m, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        fill(&mut Vec::with_capacity(parts), parts, divisions, &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub weights: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub objective: MetricSpec,
    pub best_weights: Vec<f64>,
    pub best_score: f64,
    /// In lattice order.
    pub trials: Vec<Trial>,
}

/// Precomputed fusion inputs of one evaluable query.
struct QueryTable {
    /// Candidate doc ids; owned so the table outlives the prepared lists.
    docs: Vec<alloc::string::String>,
    /// Row-major `docs x K` backfilled scores.
    values: Vec<f64>,
    grades: Vec<Option<i32>>,
}

/// Tries every lattice weight vector with linear fusion and keeps the first
/// one (in lattice order) that maximizes the mean objective.
///
/// Depth, normalization and output depth come from `base`; its method and
/// weights are ignored. Each trial gives the same objective as
/// `evaluate(fuse_runs(runs, config), qrels)` would.
pub fn grid_search(
    runs: &[Run],
    qrels: &Qrels,
    grid: &GridSpec,
    base: &FusionConfig,
) -> Result<TuneReport> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if runs.len() < 2 {
        return Err(Error::TooFewRuns(runs.len()));
    }
    let k = runs.len();
    let mut config = base.clone();
    config.method = FusionMethod::Linear;
    config.weights = alloc::vec![1.0; k];
    config.validate(k)?;
    let output_depth = config.output_depth();

    let query_ids: BTreeSet<&str> = runs.iter().flat_map(Run::query_ids).collect();
    let mut tables = Vec::new();
    let mut judgments = Vec::new();
    for query_id in query_ids {
        let truth = QueryJudgments::new(qrels, query_id);
        if truth.relevant() == 0 {
            continue;
        }
        let lists = runs
            .iter()
            .map(|run| match run.get(query_id) {
                Some(list) => Ok(list.clone()),
                None => RankedList::empty(query_id, config.depth),
            })
            .collect::<Result<Vec<_>>>()?;
        let (_, lists) = linear_inputs(&lists, &config)?;
        let candidates = Candidates::build(&lists);
        let values = backfilled_scores(&candidates, &lists);
        let grades = truth.grades(candidates.docs.iter().copied());
        tables.push(QueryTable {
            docs: candidates.docs.iter().map(|d| (*d).into()).collect(),
            values,
            grades,
        });
        judgments.push(truth);
    }
    if tables.is_empty() {
        return Err(Error::NoEvaluableQueries);
    }

    let divisions = grid.divisions();
    let mut trials = Vec::new();
    let mut terms = Vec::with_capacity(k);
    let mut best: Option<(usize, f64)> = None;
    for point in lattice(k, divisions) {
        let weights: Vec<f64> = point.iter().map(|&m| m as f64 / divisions as f64).collect();
        let mut total = 0.0;
        for (table, truth) in tables.iter().zip(&judgments) {
            let scores: Vec<f64> = table
                .values
                .chunks(k)
                .map(|row| weighted_sum(row, &weights, &mut terms))
                .collect();
            let docs: Vec<&str> = table.docs.iter().map(|d| d.as_str()).collect();
            let order = ranked_order(&docs, &scores, output_depth);
            let grades: Vec<Option<i32>> = order.iter().map(|&i| table.grades[i]).collect();
            total += truth.score(&grid.objective, &grades);
        }
        let mean = total / tables.len() as f64;
        if best.is_none_or(|(_, score)| mean > score) {
            best = Some((trials.len(), mean));
        }
        trials.push(Trial {
            weights,
            objective: mean,
        });
    }
    let (best_index, best_score) = best.expect("lattice is never empty");
    Ok(TuneReport {
        objective: grid.objective,
        best_weights: trials[best_index].weights.clone(),
        best_score,
        trials,
    })
}
