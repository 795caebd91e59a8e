//! File formats, report writers and the `fuselab` command-line tool built on
//! [`fuselab_core`].
//!
//! Formats:
//!
//! * runs: `query_id Q0 doc_id rank score run_tag`, whitespace separated
//! * qrels: `query_id iteration doc_id grade`
//! * pools: `query_id<TAB>doc_id`
//! * metric reports: an aligned table, or `query_id<TAB>metric<TAB>value`
//!   lines with `all` as the query id of the means
//! * tuning reports: `# objective=<m> best=<w1,...,wK> score=<v>` then one
//!   `w1,...,wK<TAB>value` line per lattice point
//! * bias, judged and collection statistics: tab-separated tables with a
//!   one-line header

pub mod cli;
pub mod config;
pub mod pool_file;
pub mod report;
pub mod trec;

pub use trec::{parse_qrels, parse_run, write_qrels, write_run, FormatError};
