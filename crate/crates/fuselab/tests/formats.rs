mod common;

use common::*;
use fuselab::pool_file::{parse_pool, write_pool};
use fuselab::{parse_qrels, parse_run, write_qrels, write_run};
use fuselab_core::pool::build_pool;
use fuselab_core::{fuse_runs, FusionConfig, FusionMethod, Qrels, RankedList, Run};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn token() -> impl Strategy<Value = String> {
    "[A-Za-z0-9_.:/-]{1,12}"
}

fn score() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |s| s.is_finite()),
        (-1000i32..1000).prop_map(f64::from),
        -1.0f64..1.0,
    ]
}

fn arb_run() -> impl Strategy<Value = Run> {
    let list = (
        token(),
        prop::collection::btree_map(token(), score(), 1..15),
    );
    (token(), prop::collection::vec(list, 0..6)).prop_map(|(tag, lists)| {
        let mut run = Run::new(tag).unwrap();
        for (q, docs) in lists {
            let n = docs.len();
            run.insert(RankedList::from_scores(q, docs, n).unwrap());
        }
        run
    })
}

fn arb_qrels() -> impl Strategy<Value = Qrels> {
    prop::collection::vec((token(), token(), -3i32..5), 0..60).prop_map(|pairs| {
        let mut q = Qrels::new();
        for (qid, d, g) in pairs {
            if q.grade(&qid, &d).is_none() {
                q.insert(qid, d, g).unwrap();
            }
        }
        q
    })
}

proptest! {
    #[test]
    fn runs_round_trip(run in arb_run()) {
        let text = write_run(&run);
        let parsed = parse_run(&text).unwrap();
        if !run.is_empty() {
            prop_assert_eq!(&parsed, &run);
        }
        prop_assert_eq!(write_run(&parsed), text);
    }

    #[test]
    fn qrels_round_trip(qrels in arb_qrels()) {
        let text = write_qrels(&qrels);
        let parsed = parse_qrels(&text).unwrap();
        prop_assert_eq!(&parsed, &qrels);
        prop_assert_eq!(write_qrels(&parsed), text);
    }

    #[test]
    fn fused_runs_reparse(a in arb_run(), b in arb_run(), m in 0usize..7) {
        let method = FusionMethod::ALL[m];
        let config = FusionConfig { method, weights: vec![0.5, 0.5], ..FusionConfig::default() };
        let fused = fuse_runs(&[a, b], &config).unwrap();
        let text = write_run(&fused);
        let parsed = parse_run(&text).unwrap();
        if !fused.is_empty() {
            prop_assert_eq!(&parsed, &fused);
        }
        prop_assert_eq!(write_run(&parsed), text);
    }
}

#[test]
fn pools_round_trip() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let runs: Vec<Run> = (0..3)
            .map(|i| random_run(&mut rng, &format!("r{i}"), 5, 15, 40))
            .collect();
        let pool = build_pool(&runs, 10).unwrap();
        let text = write_pool(&pool);
        let parsed = parse_pool(&text, 10).unwrap();
        assert_eq!(
            parsed.iter().collect::<Vec<_>>(),
            pool.iter().collect::<Vec<_>>()
        );
        assert_eq!(write_pool(&parsed), text);
    }
}

#[test]
fn whitespace_variants_parse_alike() {
    let canonical = parse_run("q1 Q0 a 1 2.5 t\nq1 Q0 b 2 1 t\n").unwrap();
    let messy = parse_run("\n  q1\tq0  a 7 2.5\tt  \r\n\nq1 Q0 b 9 1e0 t").unwrap();
    assert_eq!(canonical, messy);
    assert_eq!(write_run(&canonical), write_run(&messy));
}
