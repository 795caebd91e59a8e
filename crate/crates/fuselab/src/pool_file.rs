use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use fuselab_core::is_valid_token;
use fuselab_core::pool::Pool;

use crate::FormatError;

/// One `query_id<TAB>doc_id` line per pooled document, in id order.
pub fn write_pool(pool: &Pool) -> String {
    let mut out = String::new();
    for (q, d) in pool.iter() {
        writeln!(out, "{q}\t{d}").unwrap();
    }
    out
}

/// Reads a pool file. Depth and contributors are not stored in the file,
/// so the caller supplies the depth and contributors are left empty.
pub fn parse_pool(text: &str, depth: usize) -> Result<Pool, FormatError> {
    let mut members: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        match fields[..] {
            [] => continue,
            [q, d] if is_valid_token(q) && is_valid_token(d) => {
                members.entry(q.into()).or_default().insert(d.into());
            }
            _ => {
                return Err(FormatError::MalformedLine {
                    line: i + 1,
                    reason: "expected query_id<TAB>doc_id",
                })
            }
        }
    }
    Ok(Pool::from_members(depth, members, BTreeSet::new()))
}
