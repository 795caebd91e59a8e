//! Fusion of several ranked lists for the same query into one.
//!
//! Score-based methods ([`linear_fuse`], [`comb_sum`], [`comb_mnz`]) work on
//! (optionally normalized) scores. Rank-based methods ([`rrf_fuse`],
//! [`borda_fuse`], [`condorcet_fuse`], [`round_robin_fuse`]) only look at
//! positions.
//!
//! Every input list is first cut to [`FusionConfig::depth`]. A document's
//! per-list contributions are summed in ascending order, so fused scores do
//! not depend on the order the lists are given in.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::run::{ranking_order, RankedList, Run};
use crate::{Error, Result};

mod normalize;
mod rank;
pub(crate) mod score;

pub use normalize::normalize_scores;
pub use rank::{borda_fuse, condorcet_fuse, round_robin_fuse, rrf_fuse};
pub use score::{comb_mnz, comb_sum, linear_fuse};

pub const DEFAULT_DEPTH: usize = 1000;
pub const DEFAULT_RRF_K: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionMethod {
    /// Weighted linear combination with last-score backfill.
    Linear,
    CombSum,
    CombMnz,
    Rrf,
    Borda,
    Condorcet,
    RoundRobin,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 7] = [
        FusionMethod::Linear,
        FusionMethod::CombSum,
        FusionMethod::CombMnz,
        FusionMethod::Rrf,
        FusionMethod::Borda,
        FusionMethod::Condorcet,
        FusionMethod::RoundRobin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionMethod::Linear => "linear",
            FusionMethod::CombSum => "combsum",
            FusionMethod::CombMnz => "combmnz",
            FusionMethod::Rrf => "rrf",
            FusionMethod::Borda => "borda",
            FusionMethod::Condorcet => "condorcet",
            FusionMethod::RoundRobin => "roundrobin",
        }
    }

    /// Methods that consume scores (and therefore honour normalization).
    pub fn uses_scores(self) -> bool {
        matches!(
            self,
            FusionMethod::Linear | FusionMethod::CombSum | FusionMethod::CombMnz
        )
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let name = lower.replace(['-', '_'], "");
        FusionMethod::ALL
            .into_iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownName {
                kind: "fusion method",
                name: s.into(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    None,
    MinMax,
    ZScore,
    /// `1 - (rank - 1) / depth`.
    Rank,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::MinMax => "minmax",
            Normalization::ZScore => "zscore",
            Normalization::Rank => "rank",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Normalization::None),
            "minmax" | "min-max" => Ok(Normalization::MinMax),
            "zscore" | "z-score" => Ok(Normalization::ZScore),
            "rank" => Ok(Normalization::Rank),
            _ => Err(Error::UnknownName {
                kind: "normalization",
                name: s.into(),
            }),
        }
    }
}

/// How to fuse. The same configuration applies to every query of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionConfig {
    pub method: FusionMethod,
    /// One non-negative weight per input list; read by [`FusionMethod::Linear`] only.
    pub weights: Vec<f64>,
    /// Input lists are cut to this many entries before fusing.
    pub depth: usize,
    /// `None` picks the method default: no normalization for linear fusion,
    /// min-max for CombSUM/CombMNZ.
    pub normalization: Option<Normalization>,
    pub rrf_k: f64,
    /// Length of the fused list; `None` means `depth`.
    pub output_depth: Option<usize>,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            method: FusionMethod::Linear,
            weights: Vec::new(),
            depth: DEFAULT_DEPTH,
            normalization: None,
            rrf_k: DEFAULT_RRF_K,
            output_depth: None,
        }
    }
}

impl FusionConfig {
    pub fn new(method: FusionMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn linear(weights: impl Into<Vec<f64>>) -> Self {
        Self {
            weights: weights.into(),
            ..Self::default()
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_output_depth(mut self, output_depth: usize) -> Self {
        self.output_depth = Some(output_depth);
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = Some(normalization);
        self
    }

    pub fn with_rrf_k(mut self, rrf_k: f64) -> Self {
        self.rrf_k = rrf_k;
        self
    }

    pub fn normalization(&self) -> Normalization {
        match (self.normalization, self.method) {
            (Some(n), _) => n,
            (None, FusionMethod::CombSum | FusionMethod::CombMnz) => Normalization::MinMax,
            (None, _) => Normalization::None,
        }
    }

    pub fn output_depth(&self) -> usize {
        self.output_depth.unwrap_or(self.depth)
    }

    /// Checks the configuration for fusing `list_count` lists with the configured method.
    pub fn validate(&self, list_count: usize) -> Result<()> {
        self.check_common()?;
        if self.method == FusionMethod::Linear {
            self.check_weights(list_count)?;
        }
        Ok(())
    }

    fn check_common(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidConfig("depth must be at least 1"));
        }
        if self.output_depth == Some(0) {
            return Err(Error::InvalidConfig("output depth must be at least 1"));
        }
        if !(self.rrf_k.is_finite() && self.rrf_k > 0.0) {
            return Err(Error::InvalidConfig("rrf_k must be a positive number"));
        }
        Ok(())
    }

    fn check_weights(&self, list_count: usize) -> Result<()> {
        if self.weights.len() != list_count {
            return Err(Error::WeightArityMismatch {
                expected: list_count,
                got: self.weights.len(),
            });
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidConfig(
                "weights must be finite and non-negative",
            ));
        }
        if !self.weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidConfig("at least one weight must be positive"));
        }
        Ok(())
    }
}

/// Fuses one query's lists with the configured method.
pub fn fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    match config.method {
        FusionMethod::Linear => linear_fuse(lists, config),
        FusionMethod::CombSum => comb_sum(lists, config),
        FusionMethod::CombMnz => comb_mnz(lists, config),
        FusionMethod::Rrf => rrf_fuse(lists, config),
        FusionMethod::Borda => borda_fuse(lists, config),
        FusionMethod::Condorcet => condorcet_fuse(lists, config),
        FusionMethod::RoundRobin => round_robin_fuse(lists, config),
    }
}

/// Fuses whole runs query by query with one shared configuration.
///
/// Covers the union of the runs' query ids; a run without a list for some
/// query contributes an empty list there. The result is tagged
/// `fused-<method>`.
pub fn fuse_runs(runs: &[Run], config: &FusionConfig) -> Result<Run> {
    if runs.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.validate(runs.len())?;
    let query_ids: BTreeSet<&str> = runs.iter().flat_map(Run::query_ids).collect();
    let mut fused = Run::new(format!("fused-{}", config.method))?;
    for query_id in query_ids {
        let lists = runs
            .iter()
            .map(|run| match run.get(query_id) {
                Some(list) => Ok(list.clone()),
                None => RankedList::empty(query_id, config.depth),
            })
            .collect::<Result<Vec<_>>>()?;
        fused.insert(fuse(&lists, config)?);
    }
    Ok(fused)
}

/// Common preamble: non-empty input, one query id, lists cut to `depth`.
fn prepare(lists: &[RankedList], config: &FusionConfig) -> Result<(String, Vec<RankedList>)> {
    let first = lists.first().ok_or(Error::EmptyInput)?;
    config.check_common()?;
    let query_id = first.query_id();
    if let Some(other) = lists.iter().find(|l| l.query_id() != query_id) {
        return Err(Error::QueryMismatch {
            expected: query_id.into(),
            found: other.query_id().into(),
        });
    }
    let cut = lists.iter().map(|l| l.truncated(config.depth)).collect();
    Ok((query_id.into(), cut))
}

/// Sum of `terms` taken in ascending order. Canonical so that fused scores
/// are exactly invariant under permutation of the input lists.
pub(crate) fn sum_terms(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().fold(0.0, |acc, t| acc + t)
}

/// Where each candidate document sits in each input list.
pub(crate) struct Candidates<'a> {
    pub docs: Vec<&'a str>,
    pub list_count: usize,
    /// Row-major `docs.len() x list_count`; `(rank, score)` when present.
    slots: Vec<Option<(usize, f64)>>,
}

impl<'a> Candidates<'a> {
    pub fn build(lists: &'a [RankedList]) -> Self {
        let mut index: BTreeMap<&'a str, usize> = BTreeMap::new();
        for list in lists {
            for doc in list.doc_ids() {
                index.entry(doc).or_insert(0);
            }
        }
        for (i, slot) in index.values_mut().enumerate() {
            *slot = i;
        }
        let list_count = lists.len();
        let mut slots = alloc::vec![None; index.len() * list_count];
        for (n, list) in lists.iter().enumerate() {
            for e in list {
                slots[index[e.doc_id.as_str()] * list_count + n] = Some((e.rank, e.score));
            }
        }
        Self {
            docs: index.into_keys().collect(),
            list_count,
            slots,
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn row(&self, doc: usize) -> &[Option<(usize, f64)>] {
        &self.slots[doc * self.list_count..(doc + 1) * self.list_count]
    }
}

/// Orders candidates canonically and keeps the top `output_depth`.
pub(crate) fn finish(
    query_id: String,
    docs: &[&str],
    scores: &[f64],
    output_depth: usize,
) -> RankedList {
    let order = ranked_order(docs, scores, output_depth);
    let kept = order
        .into_iter()
        .map(|i| (String::from(docs[i]), scores[i]))
        .collect();
    RankedList::from_ordered(query_id, kept, output_depth)
}

pub(crate) fn ranked_order(docs: &[&str], scores: &[f64], limit: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_unstable_by(|&a, &b| ranking_order(scores[a], docs[a], scores[b], docs[b]));
    order.truncate(limit);
    order
}

/// Emits `docs` in the given order with synthetic descending scores
/// `n, n-1, ...` where `n` is the number of candidates.
pub(crate) fn finish_ordered(query_id: String, docs: Vec<&str>, output_depth: usize) -> RankedList {
    let n = docs.len();
    let kept = docs
        .into_iter()
        .take(output_depth)
        .enumerate()
        .map(|(i, d)| (String::from(d), (n - i) as f64))
        .collect();
    RankedList::from_ordered(query_id, kept, output_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn method_names_round_trip() {
        for m in FusionMethod::ALL {
            assert_eq!(m.name().parse::<FusionMethod>().unwrap(), m);
        }
        assert_eq!(
            "Round-Robin".parse::<FusionMethod>().unwrap(),
            FusionMethod::RoundRobin
        );
        assert!("mean".parse::<FusionMethod>().is_err());
    }

    #[test]
    fn default_normalization_depends_on_method() {
        assert_eq!(
            FusionConfig::linear(vec![1.0]).normalization(),
            Normalization::None
        );
        assert_eq!(
            FusionConfig::new(FusionMethod::CombMnz).normalization(),
            Normalization::MinMax
        );
        assert_eq!(
            FusionConfig::new(FusionMethod::CombSum)
                .with_normalization(Normalization::ZScore)
                .normalization(),
            Normalization::ZScore
        );
    }

    #[test]
    fn config_validation() {
        let c = FusionConfig::linear(vec![0.5, 0.3, 0.2]);
        assert_eq!(
            c.validate(2),
            Err(Error::WeightArityMismatch {
                expected: 2,
                got: 3
            })
        );
        assert!(FusionConfig::linear(vec![0.0, 0.0]).validate(2).is_err());
        assert!(FusionConfig::linear(vec![-1.0, 2.0]).validate(2).is_err());
        assert!(FusionConfig::linear(vec![1.0])
            .with_depth(0)
            .validate(1)
            .is_err());
        assert!(FusionConfig::new(FusionMethod::Rrf)
            .with_rrf_k(0.0)
            .validate(3)
            .is_err());
        assert!(FusionConfig::new(FusionMethod::Rrf).validate(3).is_ok());
    }

    #[test]
    fn sum_is_order_independent() {
        let mut a = [1e16, 1.0, -1e16, 3.5];
        let mut b = [3.5, -1e16, 1.0, 1e16];
        assert_eq!(sum_terms(&mut a).to_bits(), sum_terms(&mut b).to_bits());
    }
}
