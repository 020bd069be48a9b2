//! Edge-list text I/O.
//!
//! Format: one edge per line, two whitespace-separated non-negative integer
//! ids. Lines starting with `#` are comments; blank lines are ignored; LF or
//! CRLF both parse. Output uses LF, endpoints ordered `(min, max)`, and lines
//! sorted lexicographically as strings.

use crate::error::{domain, Error, Result};
use crate::graph::{Graph, NodeId};
use std::collections::HashMap;

/// A parsed edge list: the compacted graph plus provenance.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// internal id -> original label, ascending by label
    pub original_ids: Vec<u64>,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

impl LoadedGraph {
    pub fn dropped(&self) -> usize {
        self.dropped_self_loops + self.dropped_duplicates
    }
}

/// Parses edge-list text. Node labels are compacted to `0..n-1` in ascending
/// label order (so loading a file written with dense ids is the identity);
/// duplicate edges and self-loops are dropped and counted.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut label_edges: Vec<(u64, u64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (a, b, rest) = (parts.next(), parts.next(), parts.next());
        let (a, b) = match (a, b, rest) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected two whitespace-separated integers, got {line:?}"),
                })
            }
        };
        let parse = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("not a non-negative integer: {s:?}"),
            })
        };
        label_edges.push((parse(a)?, parse(b)?));
    }

    let mut originals: Vec<u64> = label_edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    originals.sort_unstable();
    originals.dedup();
    let ids: HashMap<u64, NodeId> = originals
        .iter()
        .enumerate()
        .map(|(i, &label)| (label, i as NodeId))
        .collect();
    let edges = label_edges
        .into_iter()
        .map(|(a, b)| (ids[&a], ids[&b]));
    let (graph, dropped_self_loops, dropped_duplicates) =
        Graph::from_edges_lossy(originals.len(), edges);
    Ok(LoadedGraph {
        graph,
        original_ids: originals,
        dropped_self_loops,
        dropped_duplicates,
    })
}

/// Writes internal node ids.
pub fn write_edge_list(g: &Graph) -> String {
    write_edge_list_with(g, |v| v as u64)
}

/// Writes with a label map (e.g. the original ids recorded at load time).
pub fn write_edge_list_labeled(g: &Graph, labels: &[u64]) -> Result<String> {
    if labels.len() != g.n() {
        return Err(domain(format!(
            "label map has {} entries for {} nodes",
            labels.len(),
            g.n()
        )));
    }
    Ok(write_edge_list_with(g, |v| labels[v as usize]))
}

fn write_edge_list_with(g: &Graph, label: impl Fn(NodeId) -> u64) -> String {
    let mut lines: Vec<String> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (label(u), label(v));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            format!("{a} {b}")
        })
        .collect();
    lines.sort_unstable();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let lg = load_edge_list("0 1\n1 2\n").unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.graph.m(), 2);
        assert_eq!(lg.graph.degrees(), vec![1, 2, 1]);
        assert_eq!(lg.dropped(), 0);
    }

    #[test]
    fn dedups_and_counts() {
        let lg = load_edge_list("0 1\n0 1\n1 0\n").unwrap();
        assert_eq!(lg.graph.m(), 1);
        assert_eq!(lg.dropped_duplicates, 2);

        let lg = load_edge_list("5 5\n5 6\n").unwrap();
        assert_eq!(lg.graph.m(), 1);
        assert_eq!(lg.dropped_self_loops, 1);
    }

    #[test]
    fn comments_blanks_crlf_and_labels() {
        let lg = load_edge_list("# header\r\n\r\n10 20\r\n20 30\n").unwrap();
        assert_eq!(lg.graph.n(), 3);
        assert_eq!(lg.original_ids, vec![10, 20, 30]);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = load_edge_list("0 1\nx y\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = load_edge_list("0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn round_trip() {
        let text = "0 1\n0 2\n0 3\n1 2\n";
        let lg = load_edge_list(text).unwrap();
        assert_eq!(write_edge_list(&lg.graph), text);
        let again = load_edge_list(&write_edge_list(&lg.graph)).unwrap();
        assert_eq!(again.graph, lg.graph);
    }

    #[test]
    fn output_is_lexicographic() {
        let lg = load_edge_list("2 3\n0 10\n0 2\n").unwrap();
        // labeled output keeps original ids; "0 10" sorts before "0 2"
        let out = write_edge_list_labeled(&lg.graph, &lg.original_ids).unwrap();
        assert_eq!(out, "0 10\n0 2\n2 3\n");
    }
}
