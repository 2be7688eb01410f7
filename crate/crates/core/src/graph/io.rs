//! JSON interchange (`{"n": 3, "edges": [[1,2],[2,3]]}`) and a read-only DOT subset
//! (`graph { 1 -- 2; 2 -- 3; }`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_lobster, Graph, LobsterSpec};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Canonical JSON: edges as `[i, j]` with `i < j`, sorted.
pub fn serialize_graph(g: &Graph) -> String {
    let doc = GraphJson {
        n: g.n(),
        edges: g.edges().iter().map(|&(i, j)| [i, j]).collect(),
    };
    serde_json::to_string(&doc).expect("graph JSON is always serialisable")
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let doc: GraphJson = serde_json::from_str(text)?;
    Graph::new(doc.n, doc.edges.into_iter().map(|[i, j]| (i, j)))
}

/// Parses `graph [name] { a -- b; b -- c -- d; v; }`. Vertex tokens must be
/// positive integers; `n` is the largest id mentioned. Attribute lists in
/// brackets and `node`/`edge`/`graph` defaults are ignored.
pub fn parse_dot(text: &str) -> Result<Graph> {
    let text = strip_dot_comments(text);
    let open = text
        .find('{')
        .ok_or_else(|| Error::Parse("DOT: missing '{'".into()))?;
    let close = text
        .rfind('}')
        .ok_or_else(|| Error::Parse("DOT: missing '}'".into()))?;
    let header = text[..open].split_whitespace().collect::<Vec<_>>();
    match header.as_slice() {
        ["graph", ..] | ["strict", "graph", ..] => {}
        _ => return Err(Error::Parse("DOT: only undirected `graph { ... }` is supported".into())),
    }
    let body = &text[open + 1..close];
    let mut n = 0usize;
    let mut edges = Vec::new();
    for stmt in body.split([';', '\n']) {
        let stmt = match stmt.find('[') {
            Some(p) => &stmt[..p],
            None => stmt,
        }
        .trim();
        if stmt.is_empty() || stmt.contains('=') || matches!(stmt, "node" | "edge" | "graph") {
            continue;
        }
        if stmt.contains("->") {
            return Err(Error::Parse(format!("DOT: directed edge in `{stmt}`")));
        }
        let ids = stmt
            .split("--")
            .map(|tok| {
                tok.trim()
                    .trim_matches('"')
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("DOT: bad vertex id `{}`", tok.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        n = n.max(*ids.iter().max().unwrap());
        edges.extend(ids.windows(2).map(|w| (w[0], w[1])));
    }
    Graph::new(n, edges)
}

fn strip_dot_comments(text: &str) -> String {
    text.lines()
        .map(|l| match l.find("//") {
            Some(p) => &l[..p],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Accepts graph JSON, lobster-spec JSON (realised with [`build_lobster`]) or DOT.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed)?;
        if value.get("spine_len").is_some() {
            let spec: LobsterSpec = serde_json::from_value(value)?;
            return build_lobster(&spec);
        }
        return parse_graph_json(trimmed);
    }
    parse_dot(text)
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::twin_tree;
    use crate::graph::laplacian;
    use proptest::prelude::*;

    #[test]
    fn json_examples() {
        assert_eq!(parse_graph(r#"{"n":2,"edges":[[1,2]]}"#).unwrap(), Graph::path(2));
        let err = parse_graph(r#"{"n":3,"edges":[[1,2],[2,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate edge [2,1]"), "{err}");
        let err = parse_graph(r#"{"n":3,"edges":[[1,5]]}"#).unwrap_err();
        assert!(err.to_string().contains("[1,5]"), "{err}");
    }

    #[test]
    fn twin_tree_fixture_round_trip() {
        let text = r#"{"n":7,"edges":[[1,2],[2,3],[2,4],[4,5],[4,6],[4,7]]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(laplacian(&g), laplacian(&twin_tree()));
        assert_eq!(serialize_graph(&g), text);
    }

    #[test]
    fn dot_subset() {
        let g = parse_dot("graph G {\n  1 -- 2; 2 -- 3 -- 4 [color=red];\n  // comment\n  node [shape=circle];\n}")
            .unwrap();
        assert_eq!(g, Graph::path(4));
        assert!(parse_dot("digraph { 1 -> 2 }").is_err());
        assert!(parse_dot("graph { a -- b }").is_err());
        assert!(parse_dot("graph { 1 -- 1 }").is_err());
    }

    #[test]
    fn lobster_spec_files_are_realised() {
        let g = parse_graph(r#"{"spine_len":2,"attach":[[1,1],[]]}"#).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (1, 4)]);
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(
            n in 1usize..12,
            raw in proptest::collection::vec((1usize..12, 1usize..12), 0..30),
        ) {
            let mut edges: Vec<(usize, usize)> = raw
                .into_iter()
                .filter(|&(i, j)| i <= n && j <= n && i != j)
                .map(|(i, j)| (i.min(j), i.max(j)))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            let g = Graph::new(n, edges).unwrap();
            prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        }
    }
}
