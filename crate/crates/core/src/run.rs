use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Query and document identifiers are opaque byte tokens: non-empty, no ASCII whitespace.
pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty() && !token.bytes().any(|b| b.is_ascii_whitespace())
}

fn check_token(token: &str) -> Result<()> {
    if is_valid_token(token) {
        Ok(())
    } else {
        Err(Error::InvalidToken(token.into()))
    }
}

/// Canonical list order: score descending, ties broken by doc id in reverse
/// byte-wise order (the `trec_eval` convention).
pub fn ranking_order(a_score: f64, a_doc: &str, b_score: f64, b_doc: &str) -> Ordering {
    b_score
        .partial_cmp(&a_score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| b_doc.cmp(a_doc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocScore {
    pub doc_id: String,
    /// 1-based.
    pub rank: usize,
    pub score: f64,
}

/// One query's ranked documents.
///
/// Entries are unique, ordered by [`ranking_order`], ranked `1..=len`, and
/// never longer than `depth`.
#[derive(Debug, Clone)]
pub struct RankedList {
    query_id: String,
    entries: Vec<DocScore>,
    depth: usize,
}

// `depth` is a capacity bound, not content: two lists holding the same
// entries for the same query are equal.
impl PartialEq for RankedList {
    fn eq(&self, other: &Self) -> bool {
        self.query_id == other.query_id && self.entries == other.entries
    }
}

impl RankedList {
    pub fn empty(query_id: impl Into<String>, depth: usize) -> Result<Self> {
        let query_id = query_id.into();
        check_token(&query_id)?;
        if depth == 0 {
            return Err(Error::InvalidConfig("list depth must be at least 1"));
        }
        Ok(Self {
            query_id,
            entries: Vec::new(),
            depth,
        })
    }

    /// Builds a list from `(doc_id, score)` pairs in any order. Input is
    /// sorted into canonical order and cut to `depth`.
    pub fn from_scores<I, S>(query_id: impl Into<String>, scores: I, depth: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut list = Self::empty(query_id, depth)?;
        let mut pairs: Vec<(String, f64)> = Vec::new();
        {
            let mut seen = BTreeSet::new();
            for (doc, score) in scores {
                let doc: String = doc.into();
                check_token(&doc)?;
                if !score.is_finite() {
                    return Err(Error::NonFiniteScore { doc_id: doc });
                }
                if seen.contains(&doc) {
                    return Err(Error::DuplicateDocument {
                        query_id: list.query_id.clone(),
                        doc_id: doc,
                    });
                }
                seen.insert(doc.clone());
                pairs.push((doc, score));
            }
        }
        pairs.sort_by(|a, b| ranking_order(a.1, &a.0, b.1, &b.0));
        pairs.truncate(depth);
        list.entries = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| DocScore {
                doc_id,
                rank: i + 1,
                score,
            })
            .collect();
        Ok(list)
    }

    /// Caller guarantees canonical order, unique ids and `len <= depth`.
    pub(crate) fn from_ordered(query_id: String, docs: Vec<(String, f64)>, depth: usize) -> Self {
        debug_assert!(docs.len() <= depth);
        let entries = docs
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| DocScore {
                doc_id,
                rank: i + 1,
                score,
            })
            .collect();
        Self {
            query_id,
            entries,
            depth,
        }
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[DocScore] {
        &self.entries
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, DocScore> {
        self.entries.iter()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }

    /// Score of the last-ranked entry.
    pub fn last_score(&self) -> Option<f64> {
        self.entries.last().map(|e| e.score)
    }

    /// The top `depth` entries; the returned list's depth is `min(self.depth, depth)`.
    pub fn truncated(&self, depth: usize) -> Self {
        let depth = depth.max(1).min(self.depth);
        Self {
            query_id: self.query_id.clone(),
            entries: self.entries.iter().take(depth).cloned().collect(),
            depth,
        }
    }

    /// Keeps the entries for which `keep` holds, closing rank gaps.
    pub fn retain_docs(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        let docs = self
            .entries
            .iter()
            .filter(|e| keep(&e.doc_id))
            .map(|e| (e.doc_id.clone(), e.score))
            .collect();
        Self::from_ordered(self.query_id.clone(), docs, self.depth)
    }

    /// Same documents in the same order with replaced scores.
    pub(crate) fn with_scores(&self, scores: impl IntoIterator<Item = f64>) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(scores)
            .map(|(e, score)| DocScore {
                doc_id: e.doc_id.clone(),
                rank: e.rank,
                score,
            })
            .collect();
        Self {
            query_id: self.query_id.clone(),
            entries,
            depth: self.depth,
        }
    }
}

impl<'a> IntoIterator for &'a RankedList {
    type Item = &'a DocScore;
    type IntoIter = core::slice::Iter<'a, DocScore>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// One retrieval strategy's output: a ranked list per query.
///
/// Empty lists are not stored; a query with no retrieved documents is simply
/// absent from the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    tag: String,
    lists: BTreeMap<String, RankedList>,
}

impl Run {
    /// `tag` may be empty (an empty run read from an empty file) but must not contain whitespace.
    pub fn new(tag: impl Into<String>) -> Result<Self> {
        let tag = tag.into();
        if !tag.is_empty() {
            check_token(&tag)?;
        }
        Ok(Self {
            tag,
            lists: BTreeMap::new(),
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Inserts or replaces the list for its query. Empty lists are dropped.
    pub fn insert(&mut self, list: RankedList) -> Option<RankedList> {
        if list.is_empty() {
            return self.lists.remove(list.query_id());
        }
        self.lists.insert(list.query_id.clone(), list)
    }

    pub fn get(&self, query_id: &str) -> Option<&RankedList> {
        self.lists.get(query_id)
    }

    /// Lists in query-id order.
    pub fn lists(&self) -> impl Iterator<Item = &RankedList> + '_ {
        self.lists.values()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.lists.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Total number of entries across all queries.
    pub fn entry_count(&self) -> usize {
        self.lists.values().map(RankedList::len).sum()
    }
}
