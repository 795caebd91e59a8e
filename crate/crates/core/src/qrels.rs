use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::run::is_valid_token;
use crate::{Error, Result};

/// Graded relevance judgments keyed by `(query_id, doc_id)`.
///
/// Grades of zero or below mean "judged, not relevant"; a grade of 1 or more
/// is relevant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, i32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Re-inserting an identical judgment is a no-op; a conflicting grade is an error.
    pub fn insert(
        &mut self,
        query_id: impl Into<String>,
        doc_id: impl Into<String>,
        grade: i32,
    ) -> Result<()> {
        let query_id = query_id.into();
        let doc_id = doc_id.into();
        for token in [&query_id, &doc_id] {
            if !is_valid_token(token) {
                return Err(Error::InvalidToken(token.clone()));
            }
        }
        let docs = self.judgments.entry(query_id.clone()).or_default();
        match docs.get(&doc_id) {
            Some(&g) if g == grade => Ok(()),
            Some(_) => Err(Error::DuplicateJudgment { query_id, doc_id }),
            None => {
                docs.insert(doc_id, grade);
                Ok(())
            }
        }
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> Option<i32> {
        self.judgments.get(query_id)?.get(doc_id).copied()
    }

    /// All judgments for one query.
    pub fn query(&self, query_id: &str) -> Option<&BTreeMap<String, i32>> {
        self.judgments.get(query_id)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.judgments.keys().map(String::as_str)
    }

    /// Number of judged pairs.
    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    pub fn query_count(&self) -> usize {
        self.judgments.len()
    }

    /// Documents graded 1 or above for `query_id`.
    pub fn relevant_count(&self, query_id: &str) -> usize {
        self.query(query_id)
            .map_or(0, |docs| docs.values().filter(|&&g| g >= 1).count())
    }

    /// `(query_id, doc_id, grade)` in query then doc order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, i32)> + '_ {
        self.judgments
            .iter()
            .flat_map(|(q, docs)| docs.iter().map(move |(d, &g)| (q.as_str(), d.as_str(), g)))
    }

    /// Keeps judgments for which `keep(query_id, doc_id)` holds.
    pub fn restricted(&self, mut keep: impl FnMut(&str, &str) -> bool) -> Self {
        let mut judgments = BTreeMap::new();
        for (q, docs) in &self.judgments {
            let kept: BTreeMap<String, i32> = docs
                .iter()
                .filter(|(d, _)| keep(q, d))
                .map(|(d, &g)| (d.clone(), g))
                .collect();
            if !kept.is_empty() {
                judgments.insert(q.clone(), kept);
            }
        }
        Self { judgments }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates() {
        let mut q = Qrels::new();
        q.insert("q1", "dA", 1).unwrap();
        q.insert("q1", "dA", 1).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(
            q.insert("q1", "dA", 3),
            Err(Error::DuplicateJudgment {
                query_id: "q1".into(),
                doc_id: "dA".into()
            })
        );
    }

    #[test]
    fn negative_grades_are_judged_not_relevant() {
        let mut q = Qrels::new();
        q.insert("q1", "a", -1).unwrap();
        q.insert("q1", "b", 0).unwrap();
        q.insert("q1", "c", 2).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(q.relevant_count("q1"), 1);
        assert_eq!(q.grade("q1", "a"), Some(-1));
    }
}
