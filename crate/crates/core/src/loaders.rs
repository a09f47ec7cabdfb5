//! Text loaders for plain edge lists and Pajek `.net` files.
//!
//! Both formats use 1-based node ids. Loaded graphs must be simple and
//! connected, and every node needs at least one link.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },
    #[error("line {line}: duplicate edge {a}-{b}")]
    DuplicateEdge { line: usize, a: u64, b: u64 },
    #[error("node {node} is declared but has no links")]
    IsolatedNode { node: u64 },
    #[error("no edges found")]
    NoEdges,
    #[error("malformed Pajek header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: vertex {id} is outside the declared range 1..={declared}")]
    VertexCountMismatch { line: usize, id: u64, declared: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_id(token: &str, line: usize) -> Result<u64, LoadError> {
    match token.parse::<u64>() {
        Ok(0) => Err(LoadError::Syntax {
            line,
            message: "node ids are 1-based; found 0".into(),
        }),
        Ok(id) => Ok(id),
        Err(_) => Err(LoadError::Syntax {
            line,
            message: format!("expected a node id, found {token:?}"),
        }),
    }
}

/// Parses whitespace-separated `i j` pairs, one edge per line.
///
/// Lines starting with `#` are comments. A line holding a single id declares
/// a node; declared nodes that never appear in an edge are rejected. Ids are
/// compacted to `1..=N` preserving their order, so `1 2 / 2 5` becomes a path
/// on three nodes.
pub fn load_edge_list(text: &str) -> Result<Graph, LoadError> {
    let mut declared = BTreeSet::new();
    let mut seen = BTreeMap::new();
    let mut edges = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            [single] => {
                declared.insert(parse_id(single, line)?);
            }
            [a, b] => {
                let (a, b) = (parse_id(a, line)?, parse_id(b, line)?);
                if a == b {
                    return Err(LoadError::SelfLoop { line, node: a });
                }
                let key = (a.min(b), a.max(b));
                if seen.insert(key, line).is_some() {
                    return Err(LoadError::DuplicateEdge {
                        line,
                        a: key.0,
                        b: key.1,
                    });
                }
                edges.push(key);
            }
            _ => {
                return Err(LoadError::Syntax {
                    line,
                    message: format!("expected \"i j\", found {content:?}"),
                })
            }
        }
    }

    if edges.is_empty() {
        return Err(LoadError::NoEdges);
    }
    let linked: BTreeSet<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    if let Some(&node) = declared.difference(&linked).next() {
        return Err(LoadError::IsolatedNode { node });
    }

    let compact: BTreeMap<u64, usize> = linked.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let edges: Vec<(usize, usize)> = edges.iter().map(|(a, b)| (compact[a], compact[b])).collect();
    let graph = Graph::from_edges(compact.len(), &edges)?;
    graph.require_connected()?;
    Ok(graph)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Vertices,
    Pairs,
    Lists,
}

fn parse_label(rest: &str) -> Option<String> {
    let rest = rest.trim_start();
    if let Some(stripped) = rest.strip_prefix('"') {
        stripped.find('"').map(|end| stripped[..end].to_string())
    } else {
        rest.split_whitespace().next().map(str::to_string)
    }
}

/// Parses a Pajek network: `*Vertices n`, then `*Edges` / `*Arcs` (or their
/// `*…list` forms). Weights and coordinates are ignored and arcs are read as
/// undirected edges; an edge listed twice is kept once.
pub fn load_pajek(text: &str) -> Result<Graph, LoadError> {
    let mut declared: Option<usize> = None;
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut section = None;
    let mut edges = BTreeSet::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('%') {
            continue;
        }
        if let Some(header) = content.strip_prefix('*') {
            let mut parts = header.split_whitespace();
            let keyword = parts.next().unwrap_or("").to_ascii_lowercase();
            section = Some(match keyword.as_str() {
                "vertices" => {
                    if declared.is_some() {
                        return Err(LoadError::MalformedHeader(format!(
                            "line {line}: second *Vertices section"
                        )));
                    }
                    let n = parts
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| {
                            LoadError::MalformedHeader(format!(
                                "line {line}: *Vertices needs a positive count"
                            ))
                        })?;
                    declared = Some(n);
                    labels = vec![None; n];
                    Section::Vertices
                }
                "edges" | "arcs" => Section::Pairs,
                "edgeslist" | "arcslist" => Section::Lists,
                other => {
                    return Err(LoadError::MalformedHeader(format!(
                        "line {line}: unsupported section *{other}"
                    )))
                }
            });
            if declared.is_none() {
                return Err(LoadError::MalformedHeader(format!(
                    "line {line}: *Vertices must come first"
                )));
            }
            continue;
        }

        let n = declared.ok_or_else(|| {
            LoadError::MalformedHeader(format!("line {line}: data before *Vertices"))
        })?;
        let check = |id: u64| -> Result<usize, LoadError> {
            if id as usize > n {
                Err(LoadError::VertexCountMismatch { line, id, declared: n })
            } else {
                Ok(id as usize - 1)
            }
        };
        let mut tokens = content.split_whitespace();
        let first = check(parse_id(tokens.next().unwrap(), line)?)?;
        match section.expect("declared implies a section") {
            Section::Vertices => {
                let rest = content.split_once(char::is_whitespace).map_or("", |(_, r)| r);
                labels[first] = parse_label(rest);
            }
            Section::Pairs => {
                let second = tokens.next().ok_or_else(|| LoadError::Syntax {
                    line,
                    message: "edge line needs two vertex ids".into(),
                })?;
                let second = check(parse_id(second, line)?)?;
                if first == second {
                    return Err(LoadError::SelfLoop {
                        line,
                        node: first as u64 + 1,
                    });
                }
                edges.insert((first.min(second), first.max(second)));
            }
            Section::Lists => {
                for token in tokens {
                    let other = check(parse_id(token, line)?)?;
                    if other == first {
                        return Err(LoadError::SelfLoop {
                            line,
                            node: first as u64 + 1,
                        });
                    }
                    edges.insert((first.min(other), first.max(other)));
                }
            }
        }
    }

    let n = declared.ok_or_else(|| LoadError::MalformedHeader("missing *Vertices".into()))?;
    if edges.is_empty() {
        return Err(LoadError::NoEdges);
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let graph = Graph::from_edges(n, &edges).map_err(|e| match e {
        GraphError::IsolatedNode { node } => LoadError::IsolatedNode {
            node: node as u64 + 1,
        },
        other => LoadError::Graph(other),
    })?;
    graph.require_connected()?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.unwrap_or_else(|| (i + 1).to_string()))
        .collect();
    Ok(graph.with_labels(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_edge_list() {
        let g = load_edge_list("1 2\n2 3\n1 3").unwrap();
        assert_eq!((g.node_count(), g.arc_count()), (3, 6));
    }

    #[test]
    fn comments_and_compaction() {
        let g = load_edge_list("# header\n10 20\n\n20 50\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_list_errors() {
        assert_eq!(
            load_edge_list("1 2\n2 2\n"),
            Err(LoadError::SelfLoop { line: 2, node: 2 })
        );
        assert_eq!(
            load_edge_list("1 2\n2 3\n# dup\n3 2\n"),
            Err(LoadError::DuplicateEdge { line: 4, a: 2, b: 3 })
        );
        assert_eq!(
            load_edge_list("4\n1 2\n2 3\n"),
            Err(LoadError::IsolatedNode { node: 4 })
        );
        assert!(matches!(load_edge_list("1 2 3\n"), Err(LoadError::Syntax { line: 1, .. })));
        assert!(matches!(load_edge_list("0 1\n"), Err(LoadError::Syntax { .. })));
        assert_eq!(load_edge_list("# nothing\n"), Err(LoadError::NoEdges));
        assert_eq!(
            load_edge_list("1 2\n3 4\n"),
            Err(LoadError::Graph(GraphError::Disconnected { components: 2 }))
        );
    }

    #[test]
    fn pajek_weighted_triangle_matches_edge_list() {
        let text = "*Vertices 3\n1 \"A\" 0.1 0.2 0.5\n2 \"B b\"\n3 C\n*Arcs\n*Edges\n1 2 0.5\n2 3 1.25\n3 1 2\n";
        let g = load_pajek(text).unwrap();
        let plain = load_edge_list("1 2\n2 3\n1 3").unwrap();
        assert_eq!(g.edges(), plain.edges());
        assert_eq!(g.labels().unwrap(), &["A", "B b", "C"]);
    }

    #[test]
    fn pajek_arcs_read_symmetrically() {
        let g = load_pajek("*vertices 3\n*arcs\n1 2 1\n2 1 1\n2 3\n*arcslist\n3 1 2\n").unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.labels().unwrap(), &["1", "2", "3"]);
    }

    #[test]
    fn pajek_errors() {
        assert!(matches!(load_pajek("1 2\n"), Err(LoadError::MalformedHeader(_))));
        assert!(matches!(
            load_pajek("*Edges\n1 2\n"),
            Err(LoadError::MalformedHeader(_))
        ));
        assert!(matches!(
            load_pajek("*Vertices x\n*Edges\n1 2\n"),
            Err(LoadError::MalformedHeader(_))
        ));
        assert!(matches!(
            load_pajek("*Vertices 2\n*Matrix\n0 1\n1 0\n"),
            Err(LoadError::MalformedHeader(_))
        ));
        assert_eq!(
            load_pajek("*Vertices 2\n*Edges\n1 3\n"),
            Err(LoadError::VertexCountMismatch { line: 3, id: 3, declared: 2 })
        );
        assert_eq!(
            load_pajek("*Vertices 4\n*Edges\n1 2\n2 3\n1 3\n"),
            Err(LoadError::IsolatedNode { node: 4 })
        );
    }
}
