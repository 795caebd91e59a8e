#![allow(dead_code)]

use fuselab_core::{FusionConfig, FusionMethod, Normalization, Qrels, RankedList, Run};
use fuselab_oracle::{Judgments, List, Params};

pub const INPUT_DEPTH: usize = 1000;

pub fn to_list(query_id: &str, list: &List) -> RankedList {
    RankedList::from_scores(query_id, list.iter().cloned(), INPUT_DEPTH).unwrap()
}

pub fn from_list(list: &RankedList) -> List {
    list.iter().map(|e| (e.doc_id.clone(), e.score)).collect()
}

pub fn ranked(query_id: &str, docs: &[&str]) -> RankedList {
    let n = docs.len();
    RankedList::from_scores(
        query_id,
        docs.iter().enumerate().map(|(i, d)| (*d, (n - i) as f64)),
        INPUT_DEPTH,
    )
    .unwrap()
}

pub fn run_of(tag: &str, lists: impl IntoIterator<Item = RankedList>) -> Run {
    let mut run = Run::new(tag).unwrap();
    for l in lists {
        run.insert(l);
    }
    run
}

pub fn qrels_of(pairs: &[(&str, &str, i32)]) -> Qrels {
    let mut q = Qrels::new();
    for &(qid, d, g) in pairs {
        q.insert(qid, d, g).unwrap();
    }
    q
}

pub fn qrels_from(query_id: &str, j: &Judgments) -> Qrels {
    let mut q = Qrels::new();
    for (d, &g) in j {
        q.insert(query_id, d.as_str(), g).unwrap();
    }
    q
}

pub fn config_for(method: FusionMethod, p: &Params) -> FusionConfig {
    let normalization: Normalization = p.normalization.parse().unwrap();
    FusionConfig {
        method,
        weights: p.weights.clone(),
        depth: p.depth,
        normalization: Some(normalization),
        rrf_k: p.rrf_k,
        output_depth: Some(p.output_depth),
    }
}

/// Asserts the RankedList invariants on `list`.
pub fn assert_well_formed(list: &RankedList, max_len: usize) {
    assert!(list.len() <= max_len);
    assert!(list.len() <= list.depth());
    let mut seen = std::collections::HashSet::new();
    for (i, e) in list.iter().enumerate() {
        assert_eq!(e.rank, i + 1);
        assert!(e.score.is_finite());
        assert!(seen.insert(e.doc_id.clone()), "duplicate {}", e.doc_id);
    }
    for w in list.entries().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(
            a.score > b.score || (a.score == b.score && a.doc_id > b.doc_id),
            "misordered {a:?} / {b:?}"
        );
    }
}
