//! Brute-force reference implementations for tests.
//!
//! Nothing here shares code with `fuselab-core`. Inputs are plain vectors:
//! a list is `Vec<(doc_id, score)>` in rank order, judgments are a
//! `HashMap<doc_id, grade>` for one query. Every fusion routine materializes
//! the full candidate-by-list score table and scans it linearly.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub type List = Vec<(String, f64)>;
pub type Judgments = HashMap<String, i32>;

/// Score descending, then doc id descending byte-wise.
pub fn before(a: &(String, f64), b: &(String, f64)) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0.as_bytes() > b.0.as_bytes())
}

/// Insertion sort on [`before`].
pub fn canonical_sort(items: &mut List) {
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && before(&items[j], &items[j - 1]) {
            items.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Terms added smallest first.
pub fn ascending_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.total_cmp(b));
    let mut total = 0.0;
    for t in terms {
        total += t;
    }
    total
}

fn union(lists: &[List]) -> Vec<String> {
    let mut docs: Vec<String> = Vec::new();
    for list in lists {
        for (d, _) in list {
            if !docs.contains(d) {
                docs.push(d.clone());
            }
        }
    }
    docs
}

fn lookup(list: &List, doc: &str) -> Option<(usize, f64)> {
    list.iter()
        .position(|(d, _)| d == doc)
        .map(|i| (i + 1, list[i].1))
}

fn cut(lists: &[List], depth: usize) -> Vec<List> {
    lists
        .iter()
        .map(|l| l.iter().take(depth).cloned().collect())
        .collect()
}

fn finish(mut scored: List, output_depth: usize) -> List {
    canonical_sort(&mut scored);
    scored.truncate(output_depth);
    scored
}

pub fn normalize(list: &List, method: &str, depth: usize) -> List {
    let n = list.len() as f64;
    let scores: Vec<f64> = list.iter().map(|(_, s)| *s).collect();
    let out: Vec<f64> = match method {
        "none" => scores.clone(),
        "minmax" => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &s in &scores {
                lo = lo.min(s);
                hi = hi.max(s);
            }
            scores
                .iter()
                .map(|&s| if hi == lo { 1.0 } else { (s - lo) / (hi - lo) })
                .collect()
        }
        "zscore" => {
            let mut sum = 0.0;
            for &s in &scores {
                sum += s;
            }
            let mean = sum / n;
            let mut sq = 0.0;
            for &s in &scores {
                sq += (s - mean) * (s - mean);
            }
            let sd = (sq / n).sqrt();
            scores
                .iter()
                .map(|&s| if sd == 0.0 { 0.0 } else { (s - mean) / sd })
                .collect()
        }
        "rank" => (0..list.len())
            .map(|i| 1.0 - i as f64 / depth as f64)
            .collect(),
        other => panic!("unknown normalization {other}"),
    };
    list.iter()
        .zip(out)
        .map(|((d, _), s)| (d.clone(), s))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Params {
    pub weights: Vec<f64>,
    pub depth: usize,
    pub output_depth: usize,
    pub normalization: &'static str,
    pub rrf_k: f64,
}

/// Lists cut to `depth` and normalized. Rank normalization divides by
/// `depth`: callers pass input lists at least that deep.
fn prepared(lists: &[List], p: &Params) -> Vec<List> {
    cut(lists, p.depth)
        .iter()
        .map(|l| normalize(l, p.normalization, p.depth))
        .collect()
}

/// Weighted sum with missing documents credited the list's last score.
pub fn linear(lists: &[List], p: &Params) -> List {
    let lists = prepared(lists, p);
    let table: Vec<(String, Vec<f64>)> = union(&lists)
        .into_iter()
        .map(|d| {
            let row = lists
                .iter()
                .map(|l| match lookup(l, &d) {
                    Some((_, s)) => s,
                    None => l.last().map(|x| x.1).unwrap_or(0.0),
                })
                .collect();
            (d, row)
        })
        .collect();
    let scored = table
        .into_iter()
        .map(|(d, row)| {
            let terms = row.iter().zip(&p.weights).map(|(s, w)| w * s).collect();
            (d, ascending_sum(terms))
        })
        .collect();
    finish(scored, p.output_depth)
}

pub fn comb(lists: &[List], p: &Params, mnz: bool) -> List {
    let lists = prepared(lists, p);
    let scored = union(&lists)
        .into_iter()
        .map(|d| {
            let present: Vec<f64> = lists
                .iter()
                .filter_map(|l| lookup(l, &d))
                .map(|x| x.1)
                .collect();
            let m = present.len() as f64;
            let s = ascending_sum(present);
            (d, if mnz { s * m } else { s })
        })
        .collect();
    finish(scored, p.output_depth)
}

pub fn rrf(lists: &[List], p: &Params) -> List {
    let lists = cut(lists, p.depth);
    let scored = union(&lists)
        .into_iter()
        .map(|d| {
            let terms = lists
                .iter()
                .filter_map(|l| lookup(l, &d))
                .map(|(r, _)| 1.0 / (p.rrf_k + r as f64))
                .collect();
            (d, ascending_sum(terms))
        })
        .collect();
    finish(scored, p.output_depth)
}

/// Extends every list to the whole candidate universe; absent documents
/// share the points of the unfilled positions.
fn borda_table(lists: &[List]) -> Vec<(String, f64)> {
    let universe = union(lists);
    let n = universe.len();
    let points_at = |pos: usize| (n - pos + 1) as f64;
    universe
        .iter()
        .map(|d| {
            let terms = lists
                .iter()
                .map(|l| match lookup(l, d) {
                    Some((r, _)) => points_at(r),
                    None => {
                        let open: Vec<f64> = (l.len() + 1..=n).map(points_at).collect();
                        open.iter().sum::<f64>() / open.len() as f64
                    }
                })
                .collect();
            (d.clone(), ascending_sum(terms))
        })
        .collect()
}

pub fn borda(lists: &[List], p: &Params) -> List {
    let lists = cut(lists, p.depth);
    finish(borda_table(&lists), p.output_depth)
}

fn synthetic(order: Vec<String>, output_depth: usize) -> List {
    let n = order.len();
    order
        .into_iter()
        .enumerate()
        .take(output_depth)
        .map(|(i, d)| (d, (n - i) as f64))
        .collect()
}

pub fn condorcet(lists: &[List], p: &Params) -> List {
    let lists = cut(lists, p.depth);
    let mut docs = borda_table(&lists);
    canonical_sort(&mut docs);
    let borda: HashMap<String, f64> = docs.iter().cloned().collect();
    let n = docs.len();
    let pos = |l: &List, d: &str| lookup(l, d).map_or(usize::MAX, |(r, _)| r);
    let mut wins = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in &lists {
                let (ri, rj) = (pos(l, &docs[i].0), pos(l, &docs[j].0));
                if ri < rj {
                    wins[i][j] += 1;
                }
            }
        }
    }
    let idx: HashMap<String, usize> = docs
        .iter()
        .enumerate()
        .map(|(i, (d, _))| (d.clone(), i))
        .collect();
    let precedes = |a: &String, b: &String| -> Ordering {
        let (i, j) = (idx[a], idx[b]);
        if wins[i][j] != wins[j][i] {
            return wins[j][i].cmp(&wins[i][j]);
        }
        if before(&(a.clone(), borda[a]), &(b.clone(), borda[b])) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    };
    let start: Vec<String> = docs.into_iter().map(|(d, _)| d).collect();
    synthetic(merge_sort(&start, &precedes), p.output_depth)
}

fn merge_sort(items: &[String], cmp: &dyn Fn(&String, &String) -> Ordering) -> Vec<String> {
    if items.len() < 2 {
        return items.to_vec();
    }
    let mid = items.len() / 2;
    let a = merge_sort(&items[..mid], cmp);
    let b = merge_sort(&items[mid..], cmp);
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_b = i == a.len() || (j < b.len() && cmp(&b[j], &a[i]) == Ordering::Less);
        if take_b {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push(a[i].clone());
            i += 1;
        }
    }
    out
}

pub fn round_robin(lists: &[List], p: &Params) -> List {
    let lists = cut(lists, p.depth);
    let mut order: Vec<String> = Vec::new();
    let longest = lists.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..longest {
        for l in &lists {
            if let Some((d, _)) = l.get(r) {
                if !order.contains(d) {
                    order.push(d.clone());
                }
            }
        }
    }
    synthetic(order, p.output_depth)
}

pub fn fuse(method: &str, lists: &[List], p: &Params) -> List {
    match method {
        "linear" => linear(lists, p),
        "combsum" => comb(lists, p, false),
        "combmnz" => comb(lists, p, true),
        "rrf" => rrf(lists, p),
        "borda" => borda(lists, p),
        "condorcet" => condorcet(lists, p),
        "roundrobin" => round_robin(lists, p),
        other => panic!("unknown method {other}"),
    }
}

/// Reference metrics over a ranked doc-id sequence and one query's judgments.
pub mod metrics {
    use super::Judgments;

    fn rel(j: &Judgments, d: &str) -> bool {
        j.get(d).copied().unwrap_or(0) >= 1
    }

    fn total_relevant(j: &Judgments) -> usize {
        j.values().filter(|&&g| g >= 1).count()
    }

    pub fn ndcg(ranked: &[String], j: &Judgments, k: usize, exponential: bool) -> f64 {
        let gain = |g: i32| {
            if g <= 0 {
                0.0
            } else if exponential {
                2f64.powi(g) - 1.0
            } else {
                g as f64
            }
        };
        let mut dcg = 0.0;
        for (i, d) in ranked.iter().enumerate().take(k) {
            dcg += gain(j.get(d).copied().unwrap_or(0)) / ((i + 2) as f64).log2();
        }
        let mut ideal: Vec<i32> = j.values().copied().collect();
        ideal.sort_by(|a, b| b.cmp(a));
        let mut idcg = 0.0;
        for (i, g) in ideal.into_iter().enumerate().take(k) {
            idcg += gain(g) / ((i + 2) as f64).log2();
        }
        if idcg == 0.0 {
            0.0
        } else {
            dcg / idcg
        }
    }

    pub fn reciprocal_rank(ranked: &[String], j: &Judgments, threshold: i32, cutoff: usize) -> f64 {
        for (i, d) in ranked.iter().enumerate().take(cutoff) {
            if j.get(d).copied().unwrap_or(i32::MIN) >= threshold {
                return 1.0 / (i + 1) as f64;
            }
        }
        0.0
    }

    pub fn recall(ranked: &[String], j: &Judgments, k: usize) -> f64 {
        let r = total_relevant(j);
        if r == 0 {
            return 0.0;
        }
        ranked.iter().take(k).filter(|d| rel(j, d)).count() as f64 / r as f64
    }

    pub fn average_precision(ranked: &[String], j: &Judgments, k: usize) -> f64 {
        let r = total_relevant(j);
        if r == 0 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..ranked.len().min(k) {
            if rel(j, &ranked[i]) {
                let hits = ranked[..=i].iter().filter(|d| rel(j, d)).count();
                sum += hits as f64 / (i + 1) as f64;
            }
        }
        sum / r as f64
    }

    /// `(fraction, count)` of the top `k` that carry a judgment.
    pub fn judged(ranked: &[String], j: &Judgments, k: usize) -> (f64, usize) {
        let shown = ranked.len().min(k);
        let count = ranked.iter().take(k).filter(|d| j.contains_key(*d)).count();
        let fraction = if shown == 0 {
            0.0
        } else {
            count as f64 / shown as f64
        };
        (fraction, count)
    }
}

/// Random instance generators.
pub mod gen {
    use super::*;

    pub fn doc_name(i: usize) -> String {
        format!("d{i:02}")
    }

    /// One list of up to `max_docs` distinct docs drawn from a universe of
    /// `universe` names, canonically sorted. With `discrete`, scores come
    /// from a handful of values so ties are common.
    pub fn list(rng: &mut StdRng, universe: usize, max_docs: usize, discrete: bool) -> List {
        let mut names: Vec<usize> = (0..universe).collect();
        names.shuffle(rng);
        let len = rng.gen_range(0..=max_docs.min(universe));
        let mut out: List = names[..len]
            .iter()
            .map(|&i| {
                let score = if discrete {
                    rng.gen_range(0..5) as f64
                } else {
                    rng.gen_range(-10.0..40.0)
                };
                (doc_name(i), score)
            })
            .collect();
        canonical_sort(&mut out);
        out
    }

    /// Up to 5 lists of up to 20 documents over a 25-doc universe.
    pub fn lists(rng: &mut StdRng, discrete: bool) -> Vec<List> {
        let k = rng.gen_range(1..=5);
        (0..k).map(|_| list(rng, 25, 20, discrete)).collect()
    }

    pub fn weights(rng: &mut StdRng, k: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..k)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.0..3.0)
                }
            })
            .collect();
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
        w
    }

    /// Judgments for up to `max_judged` docs of a `universe`-doc space, grades in -1..=3.
    pub fn judgments(rng: &mut StdRng, universe: usize, max_judged: usize) -> Judgments {
        let mut names: Vec<usize> = (0..universe).collect();
        names.shuffle(rng);
        let n = rng.gen_range(0..=max_judged.min(universe));
        names[..n]
            .iter()
            .map(|&i| (doc_name(i), rng.gen_range(-1..=3)))
            .collect()
    }

    /// A ranking of up to `max_docs` docs from a `universe`-doc space.
    pub fn ranking(rng: &mut StdRng, universe: usize, max_docs: usize) -> Vec<String> {
        let mut names: Vec<usize> = (0..universe).collect();
        names.shuffle(rng);
        let n = rng.gen_range(0..=max_docs.min(universe));
        names[..n].iter().map(|&i| doc_name(i)).collect()
    }
}
