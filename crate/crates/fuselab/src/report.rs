//! Text renderings of evaluation, tuning and pooling results.

use std::fmt::Write;

use fuselab_core::pool::{BiasReport, CollectionStats, STATS_CUTOFFS};
use fuselab_core::tuner::TuneReport;
use fuselab_core::{MetricReport, MetricSpec};

/// Fractions print with 4 decimals, or as percentages with 2 decimals when
/// `percent` is set. Count-valued metrics are never scaled.
pub fn format_value(spec: &MetricSpec, value: f64, percent: bool) -> String {
    // keeps -0.0 from printing as "-0.0000"
    let value = value + 0.0;
    if percent && !spec.is_count() {
        format!("{:.2}", value * 100.0)
    } else {
        format!("{value:.4}")
    }
}

/// `query_id<TAB>metric<TAB>value` per evaluated query and metric, then the
/// means under query id `all`.
pub fn metric_lines(report: &MetricReport, percent: bool) -> String {
    let mut out = String::new();
    let metrics = report.metrics();
    for (q, values) in report.per_query() {
        for (m, v) in metrics.iter().zip(values) {
            writeln!(out, "{q}\t{m}\t{}", format_value(m, *v, percent)).unwrap();
        }
    }
    for (m, v) in metrics.iter().zip(report.means()) {
        writeln!(out, "all\t{m}\t{}", format_value(m, *v, percent)).unwrap();
    }
    out
}

/// Aligned table: a header row, one row per query when `per_query` is set,
/// and a final `all` row with the means.
pub fn metric_table(report: &MetricReport, percent: bool, per_query: bool) -> String {
    let metrics = report.metrics();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["query".to_string()];
    header.extend(metrics.iter().map(ToString::to_string));
    rows.push(header);
    let render = |values: &[f64]| -> Vec<String> {
        metrics
            .iter()
            .zip(values)
            .map(|(m, v)| format_value(m, *v, percent))
            .collect()
    };
    if per_query {
        for (q, values) in report.per_query() {
            let mut row = vec![q.to_string()];
            row.extend(render(values));
            rows.push(row);
        }
    }
    let mut all = vec!["all".to_string()];
    all.extend(render(report.means()));
    rows.push(all);
    align(&rows)
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                write!(line, "{cell:<w$}", w = widths[0]).unwrap();
            } else {
                write!(line, "  {cell:>w$}", w = widths[c]).unwrap();
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn weights(w: &[f64]) -> String {
    w.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// `# objective=<m> best=<w> score=<v>` followed by `w1,...,wK<TAB>value` per trial.
pub fn tune_lines(report: &TuneReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "# objective={} best={} score={:.6}",
        report.objective,
        weights(&report.best_weights),
        report.best_score
    )
    .unwrap();
    for t in &report.trials {
        writeln!(out, "{}\t{:.6}", weights(&t.weights), t.objective).unwrap();
    }
    out
}

/// One row per query plus an `all` row of means.
pub fn bias_table(report: &BiasReport) -> String {
    let m = &report.objective;
    let mut out = String::new();
    writeln!(
        out,
        "query\t{m}_full\t{m}_without_{}\tjudged@{d}_full\tjudged@{d}_without\tjudged@{d}_delta",
        report.target,
        d = report.depth
    )
    .unwrap();
    for r in &report.rows {
        writeln!(
            out,
            "{}\t{:.4}\t{:.4}\t{}\t{}\t{}",
            r.query_id,
            r.metric_full,
            r.metric_without,
            r.judged_full,
            r.judged_without,
            r.judged_count_delta
        )
        .unwrap();
    }
    let n = report.rows.len().max(1) as f64;
    let judged_full = report
        .rows
        .iter()
        .map(|r| r.judged_full as f64)
        .fold(0.0, |a, b| a + b)
        / n;
    let judged_without = report
        .rows
        .iter()
        .map(|r| r.judged_without as f64)
        .fold(0.0, |a, b| a + b)
        / n;
    writeln!(
        out,
        "all\t{:.4}\t{:.4}\t{judged_full:.4}\t{judged_without:.4}\t{:.4}",
        report.mean_full, report.mean_without, report.mean_judged_delta
    )
    .unwrap();
    out
}

/// Judged count and fraction at some cutoff for one query of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedRow {
    pub query_id: String,
    pub count: usize,
    pub fraction: f64,
}

/// A row per `(run, query)` with the judged count and fraction at `k`,
/// plus a per-run `all` row of means.
pub fn judged_table(runs: &[(String, Vec<JudgedRow>)], k: usize) -> String {
    let mut out = String::new();
    writeln!(out, "run\tquery\tjudged_count@{k}\tjudged@{k}").unwrap();
    for (tag, rows) in runs {
        for r in rows {
            writeln!(out, "{tag}\t{}\t{}\t{:.4}", r.query_id, r.count, r.fraction).unwrap();
        }
        let n = rows.len().max(1) as f64;
        let count = rows.iter().map(|r| r.count as f64).fold(0.0, |a, b| a + b) / n;
        let fraction = rows.iter().map(|r| r.fraction).fold(0.0, |a, b| a + b) / n;
        writeln!(out, "{tag}\tall\t{count:.4}\t{fraction:.4}").unwrap();
    }
    out
}

/// Two tables separated by a blank line: the collection summary, then
/// per-run judged rates.
pub fn stats_tables(stats: &CollectionStats) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "queries\tjudged_pairs\trelevant_pairs\tjudged_per_query_min\tjudged_per_query_max\tjudged_per_query_mean\tjudged_per_query_median"
    )
    .unwrap();
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}",
        stats.query_count,
        stats.judged_pairs,
        stats.relevant_pairs,
        stats.judged_per_query_min,
        stats.judged_per_query_max,
        stats.judged_per_query_mean,
        stats.judged_per_query_median
    )
    .unwrap();
    if stats.runs.is_empty() {
        return out;
    }
    out.push('\n');
    let mut header = String::from("run\tqueries");
    for k in STATS_CUTOFFS {
        write!(header, "\tjudged@{k}").unwrap();
    }
    for k in STATS_CUTOFFS {
        write!(header, "\tjudged_count@{k}").unwrap();
    }
    writeln!(out, "{header}").unwrap();
    for r in &stats.runs {
        write!(out, "{}\t{}", r.tag, r.queries).unwrap();
        for f in r.judged_fraction {
            write!(out, "\t{f:.4}").unwrap();
        }
        for c in r.judged_count {
            write!(out, "\t{c:.4}").unwrap();
        }
        out.push('\n');
    }
    out
}
