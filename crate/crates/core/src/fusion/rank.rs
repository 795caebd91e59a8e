use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{finish, finish_ordered, prepare, sum_terms, Candidates, FusionConfig};
use crate::run::RankedList;
use crate::Result;

/// Reciprocal rank fusion: `S(D) = sum over lists containing D of 1 / (k + rank)`.
pub fn rrf_fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    let (query_id, lists) = prepare(lists, config)?;
    let candidates = Candidates::build(&lists);
    let k = config.rrf_k;
    let mut terms = Vec::with_capacity(lists.len());
    let scores: Vec<f64> = (0..candidates.len())
        .map(|d| {
            terms.clear();
            terms.extend(
                candidates
                    .row(d)
                    .iter()
                    .flatten()
                    .map(|&(rank, _)| 1.0 / (k + rank as f64)),
            );
            sum_terms(&mut terms)
        })
        .collect();
    Ok(finish(
        query_id,
        &candidates.docs,
        &scores,
        config.output_depth(),
    ))
}

/// Borda count over the candidate universe `U` (union of all lists).
///
/// Each list is viewed as a ranking of all `|U|` candidates: rank `r` earns
/// `|U| - r + 1` points and documents the list omits split the points of the
/// unfilled positions equally.
pub fn borda_fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    let (query_id, lists) = prepare(lists, config)?;
    let candidates = Candidates::build(&lists);
    let scores = borda_points(&candidates, &lists);
    Ok(finish(
        query_id,
        &candidates.docs,
        &scores,
        config.output_depth(),
    ))
}

fn borda_points(candidates: &Candidates<'_>, lists: &[RankedList]) -> Vec<f64> {
    let universe = candidates.len() as f64;
    // mean of the points 1..=(|U| - len) left over for absent documents
    let absent: Vec<f64> = lists
        .iter()
        .map(|l| (universe - l.len() as f64 + 1.0) / 2.0)
        .collect();
    let mut terms = Vec::with_capacity(lists.len());
    (0..candidates.len())
        .map(|d| {
            terms.clear();
            terms.extend(
                candidates
                    .row(d)
                    .iter()
                    .zip(&absent)
                    .map(|(slot, &a)| slot.map_or(a, |(rank, _)| universe - rank as f64 + 1.0)),
            );
            sum_terms(&mut terms)
        })
        .collect()
}

/// Sort-based Condorcet fusion.
///
/// `a` precedes `b` when more lists rank `a` above `b` than the converse. A
/// document absent from a list ranks below everything the list contains;
/// two absent documents tie in it. Pairwise ties fall back to the higher
/// Borda total (equivalently the smaller rank sum), then reverse doc id.
///
/// Majority preference can be cyclic, so the comparator is not a total
/// order. Candidates start in tie-break order and go through a stable
/// top-down merge sort, which gives a deterministic result either way.
/// Scores in the output are synthetic: `|U|, |U| - 1, ...`.
pub fn condorcet_fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    let (query_id, lists) = prepare(lists, config)?;
    let candidates = Candidates::build(&lists);
    let borda = borda_points(&candidates, &lists);
    let docs = &candidates.docs;

    let tie_break = |a: usize, b: usize| {
        borda[b]
            .total_cmp(&borda[a])
            .then_with(|| docs[b].cmp(docs[a]))
    };
    let majority = |a: usize, b: usize| {
        let (mut a_wins, mut b_wins) = (0usize, 0usize);
        for (ra, rb) in candidates.row(a).iter().zip(candidates.row(b)) {
            match (ra, rb) {
                (Some((x, _)), Some((y, _))) => match x.cmp(y) {
                    Ordering::Less => a_wins += 1,
                    Ordering::Greater => b_wins += 1,
                    Ordering::Equal => {}
                },
                (Some(_), None) => a_wins += 1,
                (None, Some(_)) => b_wins += 1,
                (None, None) => {}
            }
        }
        b_wins.cmp(&a_wins).then_with(|| tie_break(a, b))
    };

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_unstable_by(|&a, &b| tie_break(a, b));
    let order = merge_sort(order, &majority);
    let ranked = order.into_iter().map(|i| docs[i]).collect();
    Ok(finish_ordered(query_id, ranked, config.output_depth()))
}

/// Stable top-down merge sort that tolerates a non-transitive comparator.
fn merge_sort<F>(items: Vec<usize>, cmp: &F) -> Vec<usize>
where
    F: Fn(usize, usize) -> Ordering,
{
    if items.len() <= 1 {
        return items;
    }
    let mut left = items;
    let right = left.split_off(left.len() / 2);
    let left = merge_sort(left, cmp);
    let right = merge_sort(right, cmp);
    let mut out = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if cmp(right[j], left[i]) == Ordering::Less {
            out.push(right[j]);
            j += 1;
        } else {
            out.push(left[i]);
            i += 1;
        }
    }
    out.extend_from_slice(&left[i..]);
    out.extend_from_slice(&right[j..]);
    out
}

/// Interleaves the lists rank by rank in input order, skipping documents
/// already emitted. Scores in the output are synthetic: `|U|, |U| - 1, ...`.
pub fn round_robin_fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    let (query_id, lists) = prepare(lists, config)?;
    let longest = lists.iter().map(RankedList::len).max().unwrap_or(0);
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for pos in 0..longest {
        for list in &lists {
            if let Some(e) = list.entries().get(pos) {
                if seen.insert(e.doc_id.as_str()) {
                    order.push(e.doc_id.as_str());
                }
            }
        }
    }
    Ok(finish_ordered(query_id, order, config.output_depth()))
}
