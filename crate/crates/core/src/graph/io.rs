use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{DirectedGraph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Keep `a a` lines as self-loops. When false they are dropped (and still counted).
    pub allow_self_loops: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            allow_self_loops: true,
        }
    }
}

/// Bookkeeping from parsing an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub edge_lines: usize,
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

/// Parses `source<ws>target` lines; `#` lines and blank lines are skipped and
/// extra columns ignored.
pub fn parse_edge_list(text: &str, options: &ParseOptions) -> Result<(DirectedGraph, LoadReport)> {
    let mut builder = GraphBuilder::default();
    let mut seen = HashSet::new();
    let mut report = LoadReport::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(src), Some(dst)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected `source target`, got `{line}`"),
            });
        };
        report.edge_lines += 1;
        if src == dst {
            report.self_loops += 1;
            if !options.allow_self_loops {
                continue;
            }
        }
        let u = builder.add_node(src);
        let v = builder.add_node(dst);
        if !seen.insert((u, v)) {
            report.duplicate_edges += 1;
            continue;
        }
        builder.add_edge_by_index(u, v);
    }
    if report.edge_lines == 0 {
        return Err(Error::EmptyInput);
    }
    Ok((builder.build(), report))
}

pub fn load_edge_list(path: &Path, options: &ParseOptions) -> Result<(DirectedGraph, LoadReport)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, options)
}

/// Serializes one `source\ttarget` line per edge, in node-index order.
pub fn write_edge_list(g: &DirectedGraph) -> String {
    let mut out = String::with_capacity(g.edge_count() * 8);
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{}\t{}", g.name(u), g.name(v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Adjacency;

    fn parse(text: &str) -> Result<(DirectedGraph, LoadReport)> {
        parse_edge_list(text, &ParseOptions::default())
    }

    #[test]
    fn two_edges_three_nodes() {
        let (g, _) = parse("a b\nb c\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn self_loop_line() {
        let (g, r) = parse("a a").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 1));
        assert!(g.has_self_loop(0));
        assert_eq!(r.self_loops, 1);
    }

    #[test]
    fn duplicates_collapse() {
        let (g, r) = parse("a b\na\tb\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(r.duplicate_edges, 1);
    }

    #[test]
    fn comments_and_extra_columns() {
        let (g, _) = parse("# header\n\na b 0.5\n  # indented comment\nb c").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse("a b\nlonely\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse("# nothing\n"), Err(Error::EmptyInput)));
        assert!(matches!(parse(""), Err(Error::EmptyInput)));
    }

    #[test]
    fn loops_can_be_dropped() {
        let opts = ParseOptions {
            allow_self_loops: false,
        };
        let (g, r) = parse_edge_list("a a\na b", &opts).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(r.self_loops, 1);
    }

    #[test]
    fn write_then_parse_is_idempotent() {
        let (g, _) = parse("x y\ny z\nz x\ny y\n").unwrap();
        let text = write_edge_list(&g);
        let (g2, _) = parse(&text).unwrap();
        assert_eq!(write_edge_list(&g2), text);
    }
}
