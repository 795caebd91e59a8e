use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use fuselab_core::{Qrels, RankedList, Run};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: &'static str },
    #[error("line {line}: document {doc_id:?} listed twice for query {query_id:?}")]
    DuplicateDocument {
        line: usize,
        query_id: String,
        doc_id: String,
    },
    #[error("line {line}: run tag differs from the first line's")]
    InconsistentRunTag { line: usize },
    #[error("line {line}: score is not finite")]
    NonFiniteScore { line: usize },
    #[error("line {line}: conflicting grade for document {doc_id:?} in query {query_id:?}")]
    DuplicateJudgment {
        line: usize,
        query_id: String,
        doc_id: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: fuselab_core::Error,
    },
}

fn malformed(line: usize, reason: &'static str) -> FormatError {
    FormatError::MalformedLine { line, reason }
}

/// Non-empty lines with their 1-based line numbers, split on ASCII whitespace.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_ascii_whitespace().collect::<Vec<_>>()))
        .filter(|(_, fields)| !fields.is_empty())
}

/// Parses a six-column TREC run.
///
/// Input ranks must be integers but are otherwise ignored: each query's
/// list is re-sorted by score (ties by reverse doc id) and re-ranked. The
/// run tag comes from the first line and must not change. An empty input
/// gives an empty run with an empty tag.
pub fn parse_run(text: &str) -> Result<Run, FormatError> {
    // entries in file order, and the doc ids seen so far
    type Pending<'a> = (Vec<(&'a str, f64)>, HashSet<&'a str>);
    let mut tag: Option<&str> = None;
    let mut queries: BTreeMap<&str, Pending> = BTreeMap::new();
    for (line, fields) in records(text) {
        let [query_id, q0, doc_id, rank, score, run_tag] = fields[..] else {
            return Err(malformed(line, "expected 6 fields"));
        };
        if !q0.eq_ignore_ascii_case("Q0") {
            return Err(malformed(line, "second field must be Q0"));
        }
        rank.parse::<i64>()
            .map_err(|_| malformed(line, "rank is not an integer"))?;
        let score: f64 = score
            .parse()
            .map_err(|_| malformed(line, "score is not a number"))?;
        if !score.is_finite() {
            return Err(FormatError::NonFiniteScore { line });
        }
        match tag {
            None => tag = Some(run_tag),
            Some(t) if t != run_tag => return Err(FormatError::InconsistentRunTag { line }),
            Some(_) => {}
        }
        let (entries, seen) = queries.entry(query_id).or_default();
        if !seen.insert(doc_id) {
            return Err(FormatError::DuplicateDocument {
                line,
                query_id: query_id.into(),
                doc_id: doc_id.into(),
            });
        }
        entries.push((doc_id, score));
    }
    let invalid = |source| FormatError::Invalid { line: 0, source };
    let mut run = Run::new(tag.unwrap_or("")).map_err(invalid)?;
    for (query_id, (entries, _)) in queries {
        let depth = entries.len().max(1);
        run.insert(RankedList::from_scores(query_id, entries, depth).map_err(invalid)?);
    }
    Ok(run)
}

/// Parses four-column qrels. Repeating a judgment with the same grade is
/// allowed; a different grade is an error.
pub fn parse_qrels(text: &str) -> Result<Qrels, FormatError> {
    let mut qrels = Qrels::new();
    for (line, fields) in records(text) {
        let [query_id, _iteration, doc_id, grade] = fields[..] else {
            return Err(malformed(line, "expected 4 fields"));
        };
        let grade: i32 = grade
            .parse()
            .map_err(|_| malformed(line, "grade is not an integer"))?;
        qrels
            .insert(query_id, doc_id, grade)
            .map_err(|source| match source {
                fuselab_core::Error::DuplicateJudgment { query_id, doc_id } => {
                    FormatError::DuplicateJudgment {
                        line,
                        query_id,
                        doc_id,
                    }
                }
                source => FormatError::Invalid { line, source },
            })?;
    }
    Ok(qrels)
}

/// Queries in id order, entries in rank order. Scores use the shortest
/// decimal form that parses back to the same `f64`.
pub fn write_run(run: &Run) -> String {
    let mut out = String::with_capacity(run.entry_count() * 40);
    for list in run.lists() {
        for e in list {
            writeln!(
                out,
                "{} Q0 {} {} {} {}",
                list.query_id(),
                e.doc_id,
                e.rank,
                e.score,
                run.tag()
            )
            .unwrap();
        }
    }
    out
}

/// Queries then documents in id order, iteration column `0`.
pub fn write_qrels(qrels: &Qrels) -> String {
    let mut out = String::with_capacity(qrels.len() * 24);
    for (q, d, g) in qrels.iter() {
        writeln!(out, "{q} 0 {d} {g}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(run: &Run, q: &str) -> Vec<(String, f64, usize)> {
        run.get(q)
            .unwrap()
            .iter()
            .map(|e| (e.doc_id.clone(), e.score, e.rank))
            .collect()
    }

    #[test]
    fn parse_run_examples() {
        let run = parse_run("q1 Q0 dA 1 10.5 sys\nq1 Q0 dB 2 9.0 sys").unwrap();
        assert_eq!(run.tag(), "sys");
        assert_eq!(
            docs(&run, "q1"),
            [("dA".into(), 10.5, 1), ("dB".into(), 9.0, 2)]
        );

        let run = parse_run("q1 Q0 dA 2 1.0 sys\nq1 Q0 dB 1 5.0 sys").unwrap();
        assert_eq!(
            docs(&run, "q1"),
            [("dB".into(), 5.0, 1), ("dA".into(), 1.0, 2)]
        );

        let run = parse_run("q1 Q0 dA 1 3.0 sys\nq1 Q0 dB 2 3.0 sys").unwrap();
        assert_eq!(
            docs(&run, "q1"),
            [("dB".into(), 3.0, 1), ("dA".into(), 3.0, 2)]
        );
    }

    #[test]
    fn parse_run_is_whitespace_tolerant() {
        let a = parse_run("q1 Q0 dA 1 10.5 sys\nq2 q0 dB 1 9 sys\n").unwrap();
        let b = parse_run("  q1\tQ0   dA 1\t10.5 sys  \r\n\nq2 q0 dB   1 9 sys\n\n\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_run("").unwrap(), Run::new("").unwrap());
    }

    #[test]
    fn parse_run_errors() {
        use FormatError::*;
        assert_eq!(
            parse_run("q1 Q0 dA 1 1.0").unwrap_err(),
            MalformedLine {
                line: 1,
                reason: "expected 6 fields"
            }
        );
        assert!(matches!(
            parse_run("q1 Q0 dA x 1.0 s"),
            Err(MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_run("q1 Q0 dA 1 abc s"),
            Err(MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_run("q1 X0 dA 1 1 s"),
            Err(MalformedLine { line: 1, .. })
        ));
        assert_eq!(
            parse_run("q1 Q0 dA 1 NaN s").unwrap_err(),
            NonFiniteScore { line: 1 }
        );
        assert_eq!(
            parse_run("q1 Q0 dA 1 inf s").unwrap_err(),
            NonFiniteScore { line: 1 }
        );
        assert_eq!(
            parse_run("q1 Q0 dA 1 1 s\n\nq1 Q0 dB 2 0 t").unwrap_err(),
            InconsistentRunTag { line: 3 }
        );
        assert_eq!(
            parse_run("q1 Q0 dA 1 1 s\nq1 Q0 dA 2 0 s").unwrap_err(),
            DuplicateDocument {
                line: 2,
                query_id: "q1".into(),
                doc_id: "dA".into()
            }
        );
        // same doc under different queries is fine
        assert!(parse_run("q1 Q0 dA 1 1 s\nq2 Q0 dA 1 1 s").is_ok());
    }

    #[test]
    fn parse_qrels_examples() {
        let q = parse_qrels("q1 0 dA 2\nq1 0 dB 0").unwrap();
        assert_eq!(q.grade("q1", "dA"), Some(2));
        assert_eq!(q.grade("q1", "dB"), Some(0));
        assert!(parse_qrels("").unwrap().is_empty());
        assert_eq!(
            parse_qrels("q1 0 dA 1\nq1 0 dA 3").unwrap_err(),
            FormatError::DuplicateJudgment {
                line: 2,
                query_id: "q1".into(),
                doc_id: "dA".into()
            }
        );
        assert_eq!(parse_qrels("q1 0 dA 1\nq1 0 dA 1").unwrap().len(), 1);
        assert!(matches!(
            parse_qrels("q1 0 dA"),
            Err(FormatError::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_qrels("q1 0 dA 1.5"),
            Err(FormatError::MalformedLine { .. })
        ));
        assert_eq!(
            parse_qrels("q1 0 dA -1").unwrap().grade("q1", "dA"),
            Some(-1)
        );
    }

    #[test]
    fn write_run_examples() {
        let run = parse_run("q1 Q0 dA 1 10.5 sys").unwrap();
        assert_eq!(write_run(&run), "q1 Q0 dA 1 10.5 sys\n");
        let run = parse_run("q2 Q0 x 1 1 s\nq1 Q0 y 1 0.25 s").unwrap();
        assert_eq!(write_run(&run), "q1 Q0 y 1 0.25 s\nq2 Q0 x 1 1 s\n");
    }

    #[test]
    fn awkward_scores_round_trip() {
        let run = parse_run(
            "q Q0 a 1 0.1 s\nq Q0 b 2 1e-300 s\nq Q0 c 3 -0 s\nq Q0 d 4 1.7976931348623157e308 s\nq Q0 e 5 -2.5E3 s",
        )
        .unwrap();
        let text = write_run(&run);
        assert_eq!(parse_run(&text).unwrap(), run);
        assert_eq!(write_run(&parse_run(&text).unwrap()), text);
    }
}
