#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fuselab_core::{Qrels, RankedList, Run};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ranked(query_id: &str, docs: &[&str]) -> RankedList {
    let n = docs.len();
    RankedList::from_scores(
        query_id,
        docs.iter().enumerate().map(|(i, d)| (*d, (n - i) as f64)),
        1000,
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

/// A score that exercises the float writer: integers, tiny and huge
/// magnitudes, negatives and plain decimals.
pub fn awkward_score(rng: &mut StdRng) -> f64 {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(-50..50) as f64,
        1 => rng.gen_range(-1.0..1.0) * 1e-9,
        2 => rng.gen_range(-1.0..1.0) * 1e12,
        3 => rng.gen_range(0.0..1.0),
        4 => (rng.gen_range(0..1000) as f64) / 8.0,
        _ => rng.gen_range(-100.0..100.0),
    }
}

/// A run with `queries` queries of `per_query` docs each, drawn from a
/// `universe`-doc space per query.
pub fn random_run(
    rng: &mut StdRng,
    tag: &str,
    queries: usize,
    per_query: usize,
    universe: usize,
) -> Run {
    let mut run = Run::new(tag).unwrap();
    let mut names: Vec<usize> = (0..universe).collect();
    for q in 0..queries {
        names.shuffle(rng);
        let list = RankedList::from_scores(
            format!("q{q}"),
            names[..per_query]
                .iter()
                .map(|&i| (format!("doc-{i}"), awkward_score(rng))),
            per_query.max(1),
        )
        .unwrap();
        run.insert(list);
    }
    run
}

pub fn random_qrels(rng: &mut StdRng, queries: usize, per_query: usize, universe: usize) -> Qrels {
    let mut qrels = Qrels::new();
    let mut names: Vec<usize> = (0..universe).collect();
    for q in 0..queries {
        names.shuffle(rng);
        for &i in &names[..per_query] {
            qrels
                .insert(format!("q{q}"), format!("doc-{i}"), rng.gen_range(-1..=3))
                .unwrap();
        }
    }
    qrels
}

/// A scratch directory for running the binary against files.
pub struct Sandbox {
    dir: tempfile::TempDir,
}

impl Sandbox {
    pub fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    pub fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    pub fn command(&self) -> Command {
        let mut c = Command::new(env!("CARGO_BIN_EXE_fuselab"));
        c.current_dir(self.dir.path()).env_remove("FUSELAB_CONFIG");
        c
    }

    /// Runs the binary with `args` inside the sandbox.
    pub fn run(&self, args: &[&str]) -> Output {
        self.command().args(args).output().unwrap()
    }

    pub fn dir(&self) -> &Path {
        self.dir.path()
    }
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}
