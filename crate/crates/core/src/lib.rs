//! Rank fusion and retrieval evaluation primitives.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds under `#![no_std]` with `alloc`. File formats, reports and the
//! command-line front end live in the `fuselab` crate.
//!
//! The central operation is [`fusion::linear_fuse`]: a weighted sum of the
//! scores a document receives in each input list, where a document missing
//! from a list is credited with that list's last (lowest) score. Classical
//! baselines (CombSUM, CombMNZ, RRF, Borda, Condorcet, round-robin) share
//! the same configuration and output type.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

mod error;
pub mod fusion;
pub mod metrics;
pub mod pool;
mod qrels;
mod run;
pub mod tuner;

pub use error::{Error, Result};
pub use fusion::{fuse, fuse_runs, FusionConfig, FusionMethod, Normalization};
pub use metrics::{evaluate, MetricKind, MetricReport, MetricSpec};
pub use qrels::Qrels;
pub use run::{is_valid_token, ranking_order, DocScore, RankedList, Run};
