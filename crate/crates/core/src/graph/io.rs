//! Text format for port graphs.
//!
//! ```text
//! n m
//! u p_u v p_v      (m lines; 0-based nodes, 1-based ports)
//! ```
//!
//! [`to_text`] emits edges in canonical order (`u < v`, sorted by `(u, p_u)`), so
//! writing a parsed canonical file reproduces it byte for byte.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{EdgeSpec, GraphError, PortGraph};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid graph: {0}")]
    Invalid(#[from] GraphError),
}

pub fn to_text(g: &PortGraph) -> String {
    let edges = g.edges();
    let mut out = String::with_capacity(16 * (edges.len() + 1));
    let _ = writeln!(out, "{} {}", g.node_count(), edges.len());
    for (u, pu, v, pv) in edges {
        let _ = writeln!(out, "{u} {pu} {v} {pv}");
    }
    out
}

pub fn parse(text: &str) -> Result<PortGraph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(ParseError::Syntax {
        line: 1,
        message: "missing header `n m`".into(),
    })?;
    let head = numbers(line, header, 2)?;
    let (n, m) = (head[0] as usize, head[1] as usize);

    let mut edges: Vec<EdgeSpec> = Vec::with_capacity(m);
    for (line, text) in lines {
        if edges.len() == m {
            return Err(ParseError::Syntax {
                line,
                message: format!("more than the declared {m} edge lines"),
            });
        }
        let f = numbers(line, text, 4)?;
        if f[1] > u32::MAX as u64 || f[3] > u32::MAX as u64 {
            return Err(ParseError::Syntax {
                line,
                message: "port number out of range".into(),
            });
        }
        edges.push((f[0] as usize, f[1] as u32, f[2] as usize, f[3] as u32));
    }
    if edges.len() != m {
        return Err(ParseError::Syntax {
            line: text.lines().count(),
            message: format!("expected {m} edge lines, found {}", edges.len()),
        });
    }
    Ok(PortGraph::build(n, &edges)?)
}

fn numbers(line: usize, text: &str, expected: usize) -> Result<Vec<u64>, ParseError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(ParseError::Syntax {
            line,
            message: format!("expected {expected} integers, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<u64>().map_err(|_| ParseError::Syntax {
                line,
                message: format!("`{f}` is not a non-negative integer"),
            })
        })
        .collect()
}

/// SHA-256 of the canonical text form, hex encoded.
pub fn graph_hash(g: &PortGraph) -> String {
    hex::encode(Sha256::digest(to_text(g).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_canonical_text() {
        let g = PortGraph::build(3, &[(1, 2, 2, 1), (0, 1, 1, 1)]).unwrap();
        assert_eq!(to_text(&g), "3 2\n0 1 1 1\n1 2 2 1\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("2 1\n0 1 x 1\n") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("2 2\n0 1 1 1\n") {
            Err(ParseError::Syntax { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("2 2\n0 1 1 1\n0 1 1 2\n"),
            Err(ParseError::Invalid(GraphError::DuplicatePort { node: 0, port: 1 }))
        ));
    }

    #[test]
    fn hash_is_stable_under_reparse() {
        let g = PortGraph::build(3, &[(0, 1, 1, 1), (1, 2, 2, 1)]).unwrap();
        let h = parse(&to_text(&g)).unwrap();
        assert_eq!(graph_hash(&g), graph_hash(&h));
    }
}
