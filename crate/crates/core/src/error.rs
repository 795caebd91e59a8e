use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid token {0:?}: identifiers must be non-empty and free of whitespace")]
    InvalidToken(String),
    #[error("non-finite score for document {doc_id:?}")]
    NonFiniteScore { doc_id: String },
    #[error("document {doc_id:?} appears more than once for query {query_id:?}")]
    DuplicateDocument { query_id: String, doc_id: String },
    #[error("conflicting grades for document {doc_id:?} in query {query_id:?}")]
    DuplicateJudgment { query_id: String, doc_id: String },
    #[error("list for query {found:?} mixed into fusion of query {expected:?}")]
    QueryMismatch { expected: String, found: String },
    #[error("expected {expected} weights (one per input list), got {got}")]
    WeightArityMismatch { expected: usize, got: usize },
    #[error("nothing to fuse: no input lists")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("weight tuning needs at least two runs, got {0}")]
    TooFewRuns(usize),
    #[error("no query has both a ranked list and a relevant judgment")]
    NoEvaluableQueries,
    #[error("no run tagged {0:?}")]
    UnknownRunTag(String),
}
