//! TREC-style effectiveness measures over a ranked list and graded qrels.
//!
//! Conventions follow `trec_eval`: a document is relevant at grade >= 1,
//! unjudged documents count as non-relevant, NDCG uses linear gain by
//! default, and queries without any relevant judgment are left out of the
//! means.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::qrels::Qrels;
use crate::run::{RankedList, Run};
use crate::{Error, Result};

/// NDCG gain function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gain {
    /// `max(grade, 0)`
    Linear,
    /// `2^grade - 1` for positive grades
    Exponential,
}

impl Gain {
    fn of(self, grade: i32) -> f64 {
        if grade <= 0 {
            return 0.0;
        }
        match self {
            Gain::Linear => grade as f64,
            Gain::Exponential => libm::exp2(grade as f64) - 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Ndcg(Gain),
    /// Reciprocal rank of the first document graded at least `threshold`.
    ReciprocalRank {
        threshold: i32,
    },
    Recall,
    AveragePrecision,
    /// Fraction of the top documents that carry any judgment.
    Judged,
    /// Number of the top documents that carry any judgment.
    JudgedCount,
}

/// A measure plus an optional rank cutoff, written `name[@k]`:
/// `ndcg@5`, `ndcg_exp@10`, `mrr`, `recall@100`, `map@1000`, `judged@20`,
/// `judged_count@20`. Without a cutoff the whole list is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub cutoff: Option<usize>,
}

impl MetricSpec {
    pub fn new(kind: MetricKind, cutoff: Option<usize>) -> Self {
        Self { kind, cutoff }
    }

    pub fn ndcg(k: usize) -> Self {
        Self::new(MetricKind::Ndcg(Gain::Linear), Some(k))
    }

    pub fn mrr() -> Self {
        Self::new(MetricKind::ReciprocalRank { threshold: 1 }, None)
    }

    pub fn recall(k: usize) -> Self {
        Self::new(MetricKind::Recall, Some(k))
    }

    pub fn map(k: usize) -> Self {
        Self::new(MetricKind::AveragePrecision, Some(k))
    }

    pub fn judged(k: usize) -> Self {
        Self::new(MetricKind::Judged, Some(k))
    }

    /// Parses a comma-separated list, dropping repeats.
    pub fn parse_list(text: &str) -> Result<Vec<MetricSpec>> {
        let mut specs: Vec<MetricSpec> = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let spec: MetricSpec = part.parse()?;
            if !specs.contains(&spec) {
                specs.push(spec);
            }
        }
        if specs.is_empty() {
            return Err(Error::UnknownMetric(text.into()));
        }
        Ok(specs)
    }

    /// True when the value is a count rather than a fraction in `[0, 1]`.
    pub fn is_count(&self) -> bool {
        self.kind == MetricKind::JudgedCount
    }

    /// Value of this measure for one list.
    pub fn score(&self, list: &RankedList, qrels: &Qrels) -> f64 {
        let judgments = QueryJudgments::new(qrels, list.query_id());
        let grades = judgments.grades(list.doc_ids());
        judgments.score(self, &grades)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            MetricKind::Ndcg(Gain::Linear) => "ndcg".to_string(),
            MetricKind::Ndcg(Gain::Exponential) => "ndcg_exp".to_string(),
            MetricKind::ReciprocalRank { threshold: 1 } => "mrr".to_string(),
            MetricKind::ReciprocalRank { threshold } => format!("mrr{threshold}"),
            MetricKind::Recall => "recall".to_string(),
            MetricKind::AveragePrecision => "map".to_string(),
            MetricKind::Judged => "judged".to_string(),
            MetricKind::JudgedCount => "judged_count".to_string(),
        };
        match self.cutoff {
            Some(k) => write!(f, "{name}@{k}"),
            None => f.write_str(&name),
        }
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownMetric(s.into());
        let lower = s.trim().to_ascii_lowercase();
        let (name, cutoff) = match lower.split_once('@') {
            Some((name, k)) => {
                let k: usize = k.parse().map_err(|_| unknown())?;
                if k == 0 {
                    return Err(unknown());
                }
                (name, Some(k))
            }
            None => (lower.as_str(), None),
        };
        let kind = match name {
            "ndcg" => MetricKind::Ndcg(Gain::Linear),
            "ndcg_exp" => MetricKind::Ndcg(Gain::Exponential),
            "mrr" | "rr" | "recip_rank" => MetricKind::ReciprocalRank { threshold: 1 },
            "recall" | "r" => MetricKind::Recall,
            "map" | "ap" => MetricKind::AveragePrecision,
            "judged" => MetricKind::Judged,
            "judged_count" => MetricKind::JudgedCount,
            other => match other.strip_prefix("mrr").map(str::parse::<i32>) {
                Some(Ok(threshold)) if threshold >= 1 => MetricKind::ReciprocalRank { threshold },
                _ => return Err(unknown()),
            },
        };
        Ok(Self { kind, cutoff })
    }
}

/// Per-query view of the qrels that every measure needs.
#[derive(Debug, Clone)]
pub(crate) struct QueryJudgments<'a> {
    docs: Option<&'a BTreeMap<String, i32>>,
    /// All grades of the query, descending (for the ideal DCG).
    sorted_grades: Vec<i32>,
    relevant: usize,
}

impl<'a> QueryJudgments<'a> {
    pub fn new(qrels: &'a Qrels, query_id: &str) -> Self {
        let docs = qrels.query(query_id);
        let mut sorted_grades: Vec<i32> =
            docs.map_or_else(Vec::new, |d| d.values().copied().collect());
        sorted_grades.sort_unstable_by(|a, b| b.cmp(a));
        let relevant = sorted_grades.iter().filter(|&&g| g >= 1).count();
        Self {
            docs,
            sorted_grades,
            relevant,
        }
    }

    pub fn relevant(&self) -> usize {
        self.relevant
    }

    pub fn grade(&self, doc_id: &str) -> Option<i32> {
        self.docs?.get(doc_id).copied()
    }

    pub fn grades<'d>(&self, docs: impl Iterator<Item = &'d str>) -> Vec<Option<i32>> {
        docs.map(|d| self.grade(d)).collect()
    }

    /// Evaluates `spec` given the grade (if judged) at each rank.
    pub fn score(&self, spec: &MetricSpec, grades: &[Option<i32>]) -> f64 {
        let k = spec.cutoff.unwrap_or(usize::MAX);
        let top = &grades[..grades.len().min(k)];
        let is_rel = |g: &Option<i32>| g.is_some_and(|g| g >= 1);
        match spec.kind {
            MetricKind::Ndcg(gain) => {
                let dcg = top
                    .iter()
                    .enumerate()
                    .map(|(i, g)| gain.of(g.unwrap_or(0)) / discount(i))
                    .fold(0.0, |a, b| a + b);
                let idcg = self
                    .sorted_grades
                    .iter()
                    .take(k)
                    .enumerate()
                    .map(|(i, &g)| gain.of(g) / discount(i))
                    .fold(0.0, |a, b| a + b);
                if idcg > 0.0 {
                    dcg / idcg
                } else {
                    0.0
                }
            }
            MetricKind::ReciprocalRank { threshold } => top
                .iter()
                .position(|g| g.is_some_and(|g| g >= threshold))
                .map_or(0.0, |i| 1.0 / (i + 1) as f64),
            MetricKind::Recall => {
                if self.relevant == 0 {
                    return 0.0;
                }
                top.iter().filter(|g| is_rel(g)).count() as f64 / self.relevant as f64
            }
            MetricKind::AveragePrecision => {
                if self.relevant == 0 {
                    return 0.0;
                }
                let mut hits = 0usize;
                let mut sum = 0.0;
                for (i, g) in top.iter().enumerate() {
                    if is_rel(g) {
                        hits += 1;
                        sum += hits as f64 / (i + 1) as f64;
                    }
                }
                sum / self.relevant as f64
            }
            MetricKind::Judged => {
                if top.is_empty() {
                    0.0
                } else {
                    top.iter().filter(|g| g.is_some()).count() as f64 / top.len() as f64
                }
            }
            MetricKind::JudgedCount => top.iter().filter(|g| g.is_some()).count() as f64,
        }
    }
}

/// `log2(rank + 1)` for the 0-based position `i`.
fn discount(i: usize) -> f64 {
    libm::log2((i + 2) as f64)
}

/// NDCG@k with linear gain; 0 when the query has no positive grade.
pub fn ndcg_at_k(list: &RankedList, qrels: &Qrels, k: usize) -> f64 {
    MetricSpec::ndcg(k).score(list, qrels)
}

/// Reciprocal rank of the first document with grade >= `threshold` within
/// the top `cutoff`; 0 when there is none.
pub fn mrr(list: &RankedList, qrels: &Qrels, threshold: i32, cutoff: usize) -> f64 {
    MetricSpec::new(MetricKind::ReciprocalRank { threshold }, Some(cutoff)).score(list, qrels)
}

/// Fraction of the query's relevant documents found in the top `k`.
pub fn recall_at_k(list: &RankedList, qrels: &Qrels, k: usize) -> f64 {
    MetricSpec::recall(k).score(list, qrels)
}

/// Average precision over the top `k`, normalized by the total number of
/// relevant documents in the qrels (not capped at `k`).
pub fn map_at_k(list: &RankedList, qrels: &Qrels, k: usize) -> f64 {
    MetricSpec::map(k).score(list, qrels)
}

/// How many of the top `k` documents carry a judgment of any grade, and
/// that count as a fraction of `min(k, len)`.
pub fn judged_at_k(list: &RankedList, qrels: &Qrels, k: usize) -> (f64, usize) {
    let count = MetricSpec::new(MetricKind::JudgedCount, Some(k)).score(list, qrels) as usize;
    let shown = k.min(list.len());
    let fraction = if shown == 0 {
        0.0
    } else {
        count as f64 / shown as f64
    };
    (fraction, count)
}

/// Per-query and mean values for a set of measures.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    metrics: Vec<MetricSpec>,
    per_query: BTreeMap<String, Vec<f64>>,
    means: Vec<f64>,
    skipped: BTreeSet<String>,
}

impl MetricReport {
    pub fn metrics(&self) -> &[MetricSpec] {
        &self.metrics
    }

    /// Evaluated queries in id order, each with one value per metric.
    pub fn per_query(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.per_query
            .iter()
            .map(|(q, v)| (q.as_str(), v.as_slice()))
    }

    /// Means over evaluated queries, aligned with [`metrics`](Self::metrics).
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn value(&self, query_id: &str, metric: &MetricSpec) -> Option<f64> {
        let col = self.column(metric)?;
        self.per_query.get(query_id).map(|v| v[col])
    }

    pub fn mean(&self, metric: &MetricSpec) -> Option<f64> {
        self.column(metric).map(|col| self.means[col])
    }

    pub fn evaluated_query_count(&self) -> usize {
        self.per_query.len()
    }

    /// Queries left out of the means: no relevant judgment, absent from the
    /// qrels, or absent from the run.
    pub fn skipped_query_ids(&self) -> &BTreeSet<String> {
        &self.skipped
    }

    fn column(&self, metric: &MetricSpec) -> Option<usize> {
        self.metrics.iter().position(|m| m == metric)
    }
}

/// Evaluates every query present in both the run and the qrels that has at
/// least one relevant judgment.
pub fn evaluate(run: &Run, qrels: &Qrels, metrics: &[MetricSpec]) -> MetricReport {
    evaluate_lists(run.lists(), qrels, metrics)
}

/// [`evaluate`] over arbitrary lists, which may be empty. Each list stands
/// for its query; an empty list scores 0 instead of being skipped.
pub(crate) fn evaluate_lists<'a>(
    lists: impl Iterator<Item = &'a RankedList>,
    qrels: &Qrels,
    metrics: &[MetricSpec],
) -> MetricReport {
    let mut per_query = BTreeMap::new();
    let mut skipped = BTreeSet::new();
    for list in lists {
        let judgments = QueryJudgments::new(qrels, list.query_id());
        if judgments.relevant() == 0 {
            skipped.insert(list.query_id().to_string());
            continue;
        }
        let grades = judgments.grades(list.doc_ids());
        let values = metrics
            .iter()
            .map(|m| judgments.score(m, &grades))
            .collect();
        per_query.insert(list.query_id().to_string(), values);
    }
    for query_id in qrels.query_ids() {
        if !per_query.contains_key(query_id) {
            skipped.insert(query_id.to_string());
        }
    }
    let means = mean_columns(metrics.len(), per_query.values().map(Vec::as_slice));
    MetricReport {
        metrics: metrics.to_vec(),
        per_query,
        means,
        skipped,
    }
}

pub(crate) fn mean_columns<'a>(width: usize, rows: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sums = alloc::vec![0.0; width];
    let mut n = 0usize;
    for row in rows {
        n += 1;
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    if n > 0 {
        for s in &mut sums {
            *s /= n as f64;
        }
    }
    sums
}
