use alloc::vec::Vec;

use super::Normalization;
use crate::run::RankedList;

/// Rescales a list's scores, keeping documents and order.
///
/// Degenerate inputs: min-max over a constant list gives 1.0 everywhere,
/// z-score over a constant list gives 0.0 everywhere. The z-score uses the
/// population standard deviation. Rank normalization maps rank `r` to
/// `1 - (r - 1) / depth`.
pub fn normalize_scores(list: &RankedList, normalization: Normalization) -> RankedList {
    if list.is_empty() {
        return list.clone();
    }
    let scores: Vec<f64> = list.iter().map(|e| e.score).collect();
    let n = scores.len() as f64;
    let normalized: Vec<f64> = match normalization {
        Normalization::None => return list.clone(),
        Normalization::MinMax => {
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            if max == min {
                alloc::vec![1.0; scores.len()]
            } else {
                let range = max - min;
                scores.iter().map(|s| (s - min) / range).collect()
            }
        }
        Normalization::ZScore => {
            let mean = scores.iter().sum::<f64>() / n;
            let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
            let sd = libm::sqrt(var);
            if sd == 0.0 {
                alloc::vec![0.0; scores.len()]
            } else {
                scores.iter().map(|s| (s - mean) / sd).collect()
            }
        }
        Normalization::Rank => {
            let depth = list.depth() as f64;
            list.iter()
                .map(|e| 1.0 - (e.rank - 1) as f64 / depth)
                .collect()
        }
    };
    list.with_scores(normalized)
}
