//! Judgment pools and assessment-bias diagnostics.
//!
//! Assessment is modelled as restricting a complete ("oracle") set of
//! judgments to the documents a pool contains. Comparing a run's scores
//! under pools built with and without that run shows how much it is
//! disadvantaged when it did not contribute to the judgments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::metrics::{evaluate_lists, judged_at_k, MetricReport, MetricSpec, QueryJudgments};
use crate::qrels::Qrels;
use crate::run::{RankedList, Run};
use crate::{Error, Result};

/// Per-query union of the top-`depth` documents of the contributing runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    depth: usize,
    members: BTreeMap<String, BTreeSet<String>>,
    contributors: BTreeSet<String>,
}

impl Pool {
    /// Builds a pool directly from memberships (e.g. read back from a file).
    pub fn from_members(
        depth: usize,
        members: BTreeMap<String, BTreeSet<String>>,
        contributors: BTreeSet<String>,
    ) -> Self {
        Self {
            depth,
            members,
            contributors,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contributors(&self) -> &BTreeSet<String> {
        &self.contributors
    }

    pub fn members(&self, query_id: &str) -> Option<&BTreeSet<String>> {
        self.members.get(query_id)
    }

    pub fn contains(&self, query_id: &str, doc_id: &str) -> bool {
        self.members
            .get(query_id)
            .is_some_and(|docs| docs.contains(doc_id))
    }

    /// `(query_id, doc_id)` pairs in order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.members
            .iter()
            .flat_map(|(q, docs)| docs.iter().map(move |d| (q.as_str(), d.as_str())))
    }

    pub fn len(&self) -> usize {
        self.members.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn build_pool(runs: &[Run], depth: usize) -> Result<Pool> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if depth == 0 {
        return Err(Error::InvalidConfig("pool depth must be at least 1"));
    }
    Ok(pool_of(runs.iter(), depth))
}

fn pool_of<'a>(runs: impl Iterator<Item = &'a Run>, depth: usize) -> Pool {
    let mut members: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut contributors = BTreeSet::new();
    for run in runs {
        contributors.insert(run.tag().to_string());
        for list in run.lists() {
            let docs = members.entry(list.query_id().to_string()).or_default();
            docs.extend(list.doc_ids().take(depth).map(String::from));
        }
    }
    Pool {
        depth,
        members,
        contributors,
    }
}

/// The oracle judgments an assessor would have produced for this pool.
pub fn simulate_qrels(pool: &Pool, oracle_qrels: &Qrels) -> Qrels {
    oracle_qrels.restricted(|q, d| pool.contains(q, d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasRow {
    pub query_id: String,
    /// Objective under the pool of all runs.
    pub metric_full: f64,
    /// Objective under the pool without the target run.
    pub metric_without: f64,
    pub judged_full: usize,
    pub judged_without: usize,
    /// `judged_full - judged_without` at the pool depth; never negative.
    pub judged_count_delta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasReport {
    pub target: String,
    pub objective: MetricSpec,
    pub depth: usize,
    pub rows: Vec<BiasRow>,
    pub mean_full: f64,
    pub mean_without: f64,
    pub mean_judged_delta: f64,
}

/// Scores the target run against oracle judgments restricted to the pool
/// of all runs, then to the pool of all runs but the target.
///
/// Rows cover the target's queries that have at least one relevant oracle
/// judgment. A query left with no relevant judgment under a restricted
/// pool scores 0 there.
pub fn leave_one_out_bias(
    runs: &[Run],
    target_tag: &str,
    oracle_qrels: &Qrels,
    depth: usize,
    objective: &MetricSpec,
) -> Result<BiasReport> {
    let target = runs
        .iter()
        .find(|r| r.tag() == target_tag)
        .ok_or_else(|| Error::UnknownRunTag(target_tag.into()))?;
    let full = simulate_qrels(&build_pool(runs, depth)?, oracle_qrels);
    let without = simulate_qrels(
        &pool_of(runs.iter().filter(|r| r.tag() != target_tag), depth),
        oracle_qrels,
    );

    let mut rows = Vec::new();
    for list in target.lists() {
        let query_id = list.query_id();
        if oracle_qrels.relevant_count(query_id) == 0 {
            continue;
        }
        let score = |qrels: &Qrels| {
            let judgments = QueryJudgments::new(qrels, query_id);
            judgments.score(objective, &judgments.grades(list.doc_ids()))
        };
        let (_, judged_full) = judged_at_k(list, &full, depth);
        let (_, judged_without) = judged_at_k(list, &without, depth);
        rows.push(BiasRow {
            query_id: query_id.to_string(),
            metric_full: score(&full),
            metric_without: score(&without),
            judged_full,
            judged_without,
            judged_count_delta: judged_full - judged_without,
        });
    }
    let n = rows.len().max(1) as f64;
    let mean = |f: &dyn Fn(&BiasRow) -> f64| rows.iter().map(f).fold(0.0, |a, b| a + b) / n;
    Ok(BiasReport {
        target: target_tag.into(),
        objective: *objective,
        depth,
        mean_full: mean(&|r| r.metric_full),
        mean_without: mean(&|r| r.metric_without),
        mean_judged_delta: mean(&|r| r.judged_count_delta as f64),
        rows,
    })
}

/// Evaluates with unjudged documents removed from every list (ranks closed
/// up). A list with no judged document at all scores 0.
pub fn condensed_eval(run: &Run, qrels: &Qrels, metrics: &[MetricSpec]) -> MetricReport {
    let condensed: Vec<RankedList> = run
        .lists()
        .map(|list| {
            let query_id = list.query_id();
            list.retain_docs(|d| qrels.grade(query_id, d).is_some())
        })
        .collect();
    evaluate_lists(condensed.iter(), qrels, metrics)
}

pub const STATS_CUTOFFS: [usize; 3] = [10, 20, 100];

#[derive(Debug, Clone, PartialEq)]
pub struct RunJudgedStats {
    pub tag: String,
    /// Run queries that have judgments.
    pub queries: usize,
    /// Mean judged fraction at each of [`STATS_CUTOFFS`].
    pub judged_fraction: [f64; 3],
    /// Mean judged count at each of [`STATS_CUTOFFS`].
    pub judged_count: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionStats {
    pub query_count: usize,
    pub judged_pairs: usize,
    pub relevant_pairs: usize,
    pub judged_per_query_min: usize,
    pub judged_per_query_max: usize,
    pub judged_per_query_mean: f64,
    pub judged_per_query_median: f64,
    pub runs: Vec<RunJudgedStats>,
}

pub fn collection_stats(runs: &[Run], qrels: &Qrels) -> CollectionStats {
    let mut per_query: Vec<usize> = qrels
        .query_ids()
        .map(|q| qrels.query(q).map_or(0, BTreeMap::len))
        .collect();
    per_query.sort_unstable();
    let query_count = per_query.len();
    let median = match query_count {
        0 => 0.0,
        n if n % 2 == 1 => per_query[n / 2] as f64,
        n => (per_query[n / 2 - 1] + per_query[n / 2]) as f64 / 2.0,
    };
    let relevant_pairs = qrels.iter().filter(|&(_, _, g)| g >= 1).count();

    let runs = runs
        .iter()
        .map(|run| {
            let judged_lists: Vec<&RankedList> = run
                .lists()
                .filter(|l| qrels.query(l.query_id()).is_some())
                .collect();
            let n = judged_lists.len();
            let mut fraction = [0.0; 3];
            let mut count = [0.0; 3];
            for list in &judged_lists {
                for (i, &k) in STATS_CUTOFFS.iter().enumerate() {
                    let (f, c) = judged_at_k(list, qrels, k);
                    fraction[i] += f;
                    count[i] += c as f64;
                }
            }
            if n > 0 {
                for i in 0..3 {
                    fraction[i] /= n as f64;
                    count[i] /= n as f64;
                }
            }
            RunJudgedStats {
                tag: run.tag().to_string(),
                queries: n,
                judged_fraction: fraction,
                judged_count: count,
            }
        })
        .collect();

    CollectionStats {
        query_count,
        judged_pairs: qrels.len(),
        relevant_pairs,
        judged_per_query_min: per_query.first().copied().unwrap_or(0),
        judged_per_query_max: per_query.last().copied().unwrap_or(0),
        judged_per_query_mean: if query_count == 0 {
            0.0
        } else {
            qrels.len() as f64 / query_count as f64
        },
        judged_per_query_median: median,
        runs,
    }
}
