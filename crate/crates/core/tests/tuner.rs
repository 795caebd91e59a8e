mod common;

use common::*;
use fuselab_core::tuner::{grid_search, lattice, GridSpec};
use fuselab_core::{
    evaluate, fuse_runs, Error, FusionConfig, MetricSpec, Normalization, RankedList, Run,
};
use fuselab_oracle::gen;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// One query, graded d1 > d2 > d3. The ideal run has a narrow score range,
/// the reversed one a wide range, so any positive weight on the reversed
/// run flips the fused order.
fn ideal_and_reversed() -> (Run, Run, fuselab_core::Qrels) {
    let qrels = qrels_of(&[("q", "d1", 3), ("q", "d2", 2), ("q", "d3", 1)]);
    let ideal = run_of(
        "ideal",
        [RankedList::from_scores("q", [("d1", 1.0), ("d2", 0.9), ("d3", 0.8)], 1000).unwrap()],
    );
    let reversed = run_of(
        "reversed",
        [RankedList::from_scores("q", [("d3", 100.0), ("d2", 50.0), ("d1", 0.0)], 1000).unwrap()],
    );
    (ideal, reversed, qrels)
}

#[test]
fn two_runs_half_step_has_three_trials() {
    let (a, b, qrels) = ideal_and_reversed();
    let grid = GridSpec::new(0.5, MetricSpec::ndcg(3)).unwrap();
    let report = grid_search(&[a, b], &qrels, &grid, &FusionConfig::default()).unwrap();
    let weights: Vec<Vec<f64>> = report.trials.iter().map(|t| t.weights.clone()).collect();
    assert_eq!(weights, [vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
}

#[test]
fn picks_the_ideal_run() {
    let (a, b, qrels) = ideal_and_reversed();
    for step in [0.5, 0.25, 0.1] {
        let grid = GridSpec::new(step, MetricSpec::ndcg(3)).unwrap();
        let report = grid_search(
            &[a.clone(), b.clone()],
            &qrels,
            &grid,
            &FusionConfig::default(),
        )
        .unwrap();
        assert_eq!(report.best_weights, [1.0, 0.0]);
        assert_eq!(report.best_score, 1.0);
        assert!(report.trials[..report.trials.len() - 1]
            .iter()
            .all(|t| t.objective < 1.0));
    }
}

#[test]
fn duplicate_runs_tie_everywhere() {
    let (a, _, qrels) = ideal_and_reversed();
    let b = run_of("copy", a.lists().cloned());
    let grid = GridSpec::new(0.25, MetricSpec::map(1000)).unwrap();
    let report = grid_search(&[a, b], &qrels, &grid, &FusionConfig::default()).unwrap();
    let first = report.trials[0].objective;
    assert!(report.trials.iter().all(|t| t.objective == first));
    assert_eq!(report.best_weights, report.trials[0].weights);
}

#[test]
fn trial_count_is_binomial() {
    for k in 2..=4 {
        for step in [0.5, 0.25, 0.2, 0.1] {
            let grid = GridSpec::new(step, MetricSpec::mrr()).unwrap();
            let n = grid.divisions();
            assert_eq!(
                lattice(k, n).len(),
                binomial(n + k - 1, k - 1),
                "k={k} step={step}"
            );
        }
    }
}

fn random_runs(rng: &mut StdRng, k: usize, queries: usize) -> (Vec<Run>, fuselab_core::Qrels) {
    let mut runs: Vec<Run> = (0..k).map(|i| Run::new(format!("r{i}")).unwrap()).collect();
    let mut qrels = fuselab_core::Qrels::new();
    for q in 0..queries {
        let qid = format!("q{q}");
        for run in runs.iter_mut() {
            let discrete = rng.gen_bool(0.5);
            let l = gen::list(rng, 25, 20, discrete);
            run.insert(to_list(&qid, &l));
        }
        for (d, g) in gen::judgments(rng, 25, 15) {
            qrels.insert(qid.as_str(), d, g).unwrap();
        }
    }
    (runs, qrels)
}

#[test]
fn trials_agree_with_fuse_then_evaluate() {
    let mut rng = StdRng::seed_from_u64(41);
    let objectives = [
        "ndcg@5",
        "ndcg@10",
        "map@1000",
        "mrr",
        "recall@10",
        "judged@5",
    ];
    let mut checked = 0;
    for _ in 0..40 {
        let k = rng.gen_range(2..=3);
        let (runs, qrels) = random_runs(&mut rng, k, 4);
        let objective: MetricSpec = objectives[rng.gen_range(0..objectives.len())]
            .parse()
            .unwrap();
        let base = FusionConfig::default()
            .with_depth(rng.gen_range(3..=20))
            .with_output_depth(rng.gen_range(1..=30))
            .with_normalization(
                [
                    Normalization::None,
                    Normalization::MinMax,
                    Normalization::Rank,
                ][rng.gen_range(0..3)],
            );
        let grid = GridSpec::new(0.25, objective).unwrap();
        let report = match grid_search(&runs, &qrels, &grid, &base) {
            Ok(r) => r,
            Err(Error::NoEvaluableQueries) => continue,
            Err(e) => panic!("{e}"),
        };
        for trial in &report.trials {
            if trial.weights.iter().all(|&w| w == 0.0) {
                continue;
            }
            let cfg = FusionConfig {
                weights: trial.weights.clone(),
                ..base.clone()
            };
            let fused = fuse_runs(&runs, &cfg).unwrap();
            let eval = evaluate(&fused, &qrels, &[objective]);
            assert!((eval.means()[0] - trial.objective).abs() < 1e-12);
            checked += 1;
        }
        let best = report
            .trials
            .iter()
            .map(|t| t.objective)
            .fold(f64::MIN, f64::max);
        assert_eq!(report.best_score, best);
        let first = report
            .trials
            .iter()
            .position(|t| t.objective == best)
            .unwrap();
        assert_eq!(report.best_weights, report.trials[first].weights);
        // corners are lattice points
        for corner in report.trials.iter().filter(|t| t.weights.contains(&1.0)) {
            assert!(report.best_score >= corner.objective);
        }
        assert_eq!(grid_search(&runs, &qrels, &grid, &base).unwrap(), report);
    }
    assert!(checked > 100);
}

#[test]
fn errors() {
    let (a, b, qrels) = ideal_and_reversed();
    let grid = GridSpec::new(0.5, MetricSpec::ndcg(5)).unwrap();
    let base = FusionConfig::default();
    assert_eq!(
        grid_search(&[], &qrels, &grid, &base),
        Err(Error::EmptyInput)
    );
    assert_eq!(
        grid_search(std::slice::from_ref(&a), &qrels, &grid, &base),
        Err(Error::TooFewRuns(1))
    );
    let other = qrels_of(&[("elsewhere", "d1", 1)]);
    assert_eq!(
        grid_search(&[a, b], &other, &grid, &base),
        Err(Error::NoEvaluableQueries)
    );
}
