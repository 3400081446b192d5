//! Plain-text graph and partition files.
//!
//! Edge lists hold one `i j` pair per line (0-based). Blank lines and lines
//! starting with `#` are ignored, except for an optional `# nodes: N` header
//! which fixes the node count so trailing isolated nodes survive a round
//! trip. Partition files hold one `node cluster` pair per line.

use super::{Graph, Partition};
use crate::error::{Error, Result};
use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn node_count_header(body: &str) -> Option<&str> {
    let rest = body.trim().strip_prefix("nodes")?;
    Some(rest.trim_start_matches(':').trim())
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut tokens = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .ok_or_else(|| parse_err(line_no, format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| parse_err(line_no, format!("malformed token {tok:?}")))
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if let Some(extra) = tokens.next() {
        return Err(parse_err(line_no, format!("unexpected token {extra:?}")));
    }
    Ok((a, b))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n = None;
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut max_node = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            if let Some(value) = node_count_header(body) {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad node count {value:?}")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let (a, b) = parse_pair(line_no, line)?;
        if a == b {
            return Err(parse_err(line_no, format!("self-loop on node {a}")));
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            return Err(parse_err(
                line_no,
                format!("duplicate edge ({}, {})", key.0, key.1),
            ));
        }
        max_node = max_node.max(Some(key.1));
        pairs.push(key);
    }
    let inferred = max_node.map_or(0, |m| m + 1);
    let n = match declared_n {
        Some(n) if n < inferred => {
            return Err(parse_err(
                0,
                format!("header declares {n} nodes but node {} appears", inferred - 1),
            ))
        }
        Some(n) => n,
        None => inferred,
    };
    Graph::from_edges(n, pairs)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes: {}", g.n())?;
    for &(i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

/// Parses `node cluster` lines. Every node `0..n` must appear exactly once;
/// cluster labels are relabeled densely.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        entries.push((idx + 1, parse_pair(idx + 1, line)?));
    }
    let n = entries.len();
    let mut labels = vec![None; n];
    for &(line_no, (node, cluster)) in &entries {
        if node >= n {
            return Err(parse_err(
                line_no,
                format!("node {node} out of range for {n} entries"),
            ));
        }
        if labels[node].replace(cluster).is_some() {
            return Err(parse_err(line_no, format!("node {node} listed twice")));
        }
    }
    let labels: Vec<usize> = labels.into_iter().map(Option::unwrap).collect();
    Ok(Partition::from_labels(&labels))
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    parse_partition(&std::fs::read_to_string(path)?)
}

pub fn write_partition<W: Write>(p: &Partition, mut out: W) -> Result<()> {
    for (v, &c) in p.assignment().iter().enumerate() {
        writeln!(out, "{v} {c}")?;
    }
    Ok(())
}
