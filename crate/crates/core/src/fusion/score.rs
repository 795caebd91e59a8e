use alloc::string::String;
use alloc::vec::Vec;

use super::{finish, normalize_scores, prepare, sum_terms, Candidates, FusionConfig};
use crate::run::RankedList;
use crate::Result;

/// Weighted linear combination of per-list scores.
///
/// `S(D) = sum_n w_n * S_n(D)`. When `D` is missing from list `n`, `S_n(D)`
/// is the score of that list's last entry after truncation to `depth` (the
/// depth-th document of a full list), or 0 for an empty list. Normalization,
/// if configured, is applied per list before backfilling.
pub fn linear_fuse(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    let (query_id, lists) = linear_inputs(lists, config)?;
    let candidates = Candidates::build(&lists);
    let values = backfilled_scores(&candidates, &lists);
    let k = lists.len();
    let mut terms = Vec::with_capacity(k);
    let scores: Vec<f64> = values
        .chunks(k.max(1))
        .map(|row| weighted_sum(row, &config.weights, &mut terms))
        .collect();
    Ok(finish(
        query_id,
        &candidates.docs,
        &scores,
        config.output_depth(),
    ))
}

/// Validated, truncated and normalized inputs of a linear fusion.
pub(crate) fn linear_inputs(
    lists: &[RankedList],
    config: &FusionConfig,
) -> Result<(String, Vec<RankedList>)> {
    let (query_id, cut) = prepare(lists, config)?;
    config.check_weights(cut.len())?;
    Ok((query_id, normalized(cut, config)))
}

/// Row-major table of `S_n(D)` with missing entries replaced by the backfill value.
pub(crate) fn backfilled_scores(candidates: &Candidates<'_>, lists: &[RankedList]) -> Vec<f64> {
    let floors: Vec<f64> = lists
        .iter()
        .map(|l| l.last_score().unwrap_or(0.0))
        .collect();
    (0..candidates.len())
        .flat_map(|d| {
            candidates
                .row(d)
                .iter()
                .zip(&floors)
                .map(|(slot, &floor)| slot.map_or(floor, |(_, s)| s))
        })
        .collect()
}

pub(crate) fn weighted_sum(values: &[f64], weights: &[f64], terms: &mut Vec<f64>) -> f64 {
    terms.clear();
    terms.extend(values.iter().zip(weights).map(|(v, w)| w * v));
    sum_terms(terms)
}

fn normalized(lists: Vec<RankedList>, config: &FusionConfig) -> Vec<RankedList> {
    let norm = config.normalization();
    lists.iter().map(|l| normalize_scores(l, norm)).collect()
}

/// Unweighted sum of normalized scores; a missing document contributes 0.
pub fn comb_sum(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    comb(lists, config, false)
}

/// CombSUM multiplied by the number of lists that contain the document.
pub fn comb_mnz(lists: &[RankedList], config: &FusionConfig) -> Result<RankedList> {
    comb(lists, config, true)
}

fn comb(lists: &[RankedList], config: &FusionConfig, mnz: bool) -> Result<RankedList> {
    let (query_id, cut) = prepare(lists, config)?;
    let lists = normalized(cut, config);
    let candidates = Candidates::build(&lists);
    let mut terms = Vec::with_capacity(lists.len());
    let scores: Vec<f64> = (0..candidates.len())
        .map(|d| {
            terms.clear();
            terms.extend(candidates.row(d).iter().flatten().map(|&(_, s)| s));
            let hits = terms.len() as f64;
            let sum = sum_terms(&mut terms);
            if mnz {
                sum * hits
            } else {
                sum
            }
        })
        .collect();
    Ok(finish(
        query_id,
        &candidates.docs,
        &scores,
        config.output_depth(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{FusionMethod, Normalization};
    use crate::Error;
    use alloc::vec;

    fn list(pairs: &[(&str, f64)]) -> RankedList {
        RankedList::from_scores("q", pairs.iter().copied(), 1000).unwrap()
    }

    fn pairs(l: &RankedList) -> Vec<(&str, f64)> {
        l.iter().map(|e| (e.doc_id.as_str(), e.score)).collect()
    }

    #[test]
    fn single_list_identity() {
        let l = list(&[("a", 3.5), ("b", 1.25), ("c", -4.0)]);
        let out = linear_fuse(core::slice::from_ref(&l), &FusionConfig::linear(vec![1.0])).unwrap();
        assert_eq!(out, l);
    }

    #[test]
    fn equal_weights_two_lists() {
        let l1 = list(&[("dA", 10.0), ("dB", 5.0)]);
        let l2 = list(&[("dB", 8.0), ("dA", 2.0)]);
        let cfg = FusionConfig::linear(vec![0.5, 0.5]).with_depth(2);
        let out = linear_fuse(&[l1, l2], &cfg).unwrap();
        assert_eq!(pairs(&out), [("dB", 6.5), ("dA", 6.0)]);
    }

    #[test]
    fn backfill_uses_last_score_of_each_list() {
        let l1 = list(&[("dA", 10.0), ("dB", 5.0), ("dC", 1.0)]);
        let l2 = list(&[("dD", 9.0), ("dA", 8.0), ("dB", 7.0)]);
        let cfg = FusionConfig::linear(vec![1.0, 1.0])
            .with_depth(3)
            .with_output_depth(10);
        let out = linear_fuse(&[l1, l2], &cfg).unwrap();
        assert_eq!(
            pairs(&out),
            [("dA", 18.0), ("dB", 12.0), ("dD", 10.0), ("dC", 8.0)]
        );
    }

    #[test]
    fn backfill_respects_truncation_depth() {
        // With depth 2, dC is cut from l1 and l1's floor becomes 5.
        let l1 = list(&[("dA", 10.0), ("dB", 5.0), ("dC", 1.0)]);
        let l2 = list(&[("dC", 9.0)]);
        let cfg = FusionConfig::linear(vec![1.0, 1.0])
            .with_depth(2)
            .with_output_depth(10);
        let out = linear_fuse(&[l1, l2], &cfg).unwrap();
        assert_eq!(pairs(&out), [("dA", 19.0), ("dC", 14.0), ("dB", 14.0)]);
    }

    #[test]
    fn empty_list_backfills_zero() {
        let l1 = RankedList::empty("q", 10).unwrap();
        let l2 = list(&[("dA", 4.0)]);
        let out = linear_fuse(&[l1, l2], &FusionConfig::linear(vec![1.0, 2.0])).unwrap();
        assert_eq!(pairs(&out), [("dA", 8.0)]);
    }

    #[test]
    fn linear_errors() {
        let l = list(&[("a", 1.0)]);
        assert_eq!(
            linear_fuse(
                core::slice::from_ref(&l),
                &FusionConfig::linear(vec![1.0, 1.0])
            ),
            Err(Error::WeightArityMismatch {
                expected: 1,
                got: 2
            })
        );
        assert_eq!(
            linear_fuse(&[], &FusionConfig::linear(vec![])),
            Err(Error::EmptyInput)
        );
        let other = RankedList::from_scores("q2", [("a", 1.0)], 5).unwrap();
        assert!(matches!(
            linear_fuse(&[l, other], &FusionConfig::linear(vec![1.0, 1.0])),
            Err(Error::QueryMismatch { .. })
        ));
    }

    #[test]
    fn output_depth_truncates() {
        let l = list(&[("a", 3.0), ("b", 2.0), ("c", 1.0)]);
        let out = linear_fuse(&[l], &FusionConfig::linear(vec![1.0]).with_output_depth(2)).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.depth(), 2);
    }

    #[test]
    fn combsum_examples() {
        let none = FusionConfig::new(FusionMethod::CombSum).with_normalization(Normalization::None);
        let out = comb_sum(&[list(&[("dA", 1.0)]), list(&[("dA", 1.0)])], &none).unwrap();
        assert_eq!(pairs(&out), [("dA", 2.0)]);

        let minmax = FusionConfig::new(FusionMethod::CombSum);
        let l1 = list(&[("dA", 1.0), ("dB", 0.0)]);
        let l2 = list(&[("dB", 1.0), ("dA", 0.0)]);
        let out = comb_sum(&[l1, l2], &minmax).unwrap();
        assert_eq!(pairs(&out), [("dB", 1.0), ("dA", 1.0)]);

        let single = list(&[("x", 10.0), ("y", 5.0), ("z", 0.0)]);
        let out = comb_sum(core::slice::from_ref(&single), &minmax).unwrap();
        assert_eq!(out, normalize_scores(&single, Normalization::MinMax));
    }

    #[test]
    fn combmnz_examples() {
        let none = FusionConfig::new(FusionMethod::CombMnz).with_normalization(Normalization::None);
        let l1 = list(&[("d", 0.5), ("e", 0.9)]);
        let l2 = list(&[("d", 0.5)]);
        let l3 = list(&[("f", 0.7)]);
        let out = comb_mnz(&[l1.clone(), l2.clone(), l3.clone()], &none).unwrap();
        let d = out.iter().find(|e| e.doc_id == "d").unwrap();
        assert_eq!(d.score, 2.0);
        let sum = comb_sum(&[l1, l2, l3], &none).unwrap();
        let e_mnz = out.iter().find(|e| e.doc_id == "e").unwrap().score;
        let e_sum = sum.iter().find(|e| e.doc_id == "e").unwrap().score;
        assert_eq!(e_mnz, e_sum);

        let base = list(&[("a", 0.9), ("b", 0.4), ("c", 0.1)]);
        let out = comb_mnz(&[base.clone(), base.clone(), base.clone()], &none).unwrap();
        assert!(out.doc_ids().eq(base.doc_ids()));
        assert!((out.entries()[1].score - 9.0 * 0.4).abs() < 1e-12);
    }
}
