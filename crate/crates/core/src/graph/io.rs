//! Plain-text and JSON graph formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{MetricGraph, Subspace, Vertex};
use crate::error::{Error, Result};

/// JSON form: `{"n": 3, "edges": [[0,1],[1,2]], "labels": {"0": "e"}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

fn comment_or_blank(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_vertex(tok: &str, line: usize) -> Result<Vertex> {
    tok.parse::<Vertex>().map_err(|_| Error::parse(line, format!("not a vertex id: {tok:?}")))
}

/// One `u v` pair per line; `#` starts a comment.  The vertex count is one
/// more than the largest id.
pub fn parse_edge_list(text: &str) -> Result<MetricGraph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (i, line) in text.lines().enumerate() {
        if comment_or_blank(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(i + 1, format!("expected two ids, found {}", toks.len())));
        }
        let u = parse_vertex(toks[0], i + 1)?;
        let v = parse_vertex(toks[1], i + 1)?;
        n = n.max(u.max(v) as usize + 1);
        edges.push((u, v));
    }
    MetricGraph::from_edges(n.max(1), edges)
}

pub fn parse_graph_json(text: &str) -> Result<MetricGraph> {
    let raw: GraphJson = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let g = MetricGraph::from_edges(raw.n, raw.edges.iter().map(|e| (e[0], e[1])))?;
    if raw.labels.is_empty() {
        return Ok(g);
    }
    let mut labels = vec![String::new(); raw.n];
    for (k, v) in raw.labels {
        let id: usize = k.parse().map_err(|_| Error::parse(0, format!("bad label key {k:?}")))?;
        if id >= raw.n {
            return Err(Error::UnknownVertex(id as Vertex));
        }
        labels[id] = v;
    }
    g.with_labels(labels)
}

/// Detects the format from the first non-blank character.
pub fn parse_graph(text: &str) -> Result<MetricGraph> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_edge_list(text)
    }
}

pub fn to_json(g: &MetricGraph) -> GraphJson {
    let labels = g
        .labels()
        .map(|l| l.iter().enumerate().map(|(i, s)| (i.to_string(), s.clone())).collect())
        .unwrap_or_default();
    GraphJson { n: g.vertex_count(), edges: g.edges().map(|(u, v)| [u, v]).collect(), labels }
}

pub fn to_edge_list(g: &MetricGraph) -> String {
    let mut s = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

/// DOT output; vertices in `highlight` are drawn as filled boxes.
pub fn to_dot(g: &MetricGraph, highlight: &[Vertex]) -> String {
    let mut s = String::from("graph G {\n");
    for v in 0..g.vertex_count() as Vertex {
        let label = g.label(v).map(str::to_string).unwrap_or_else(|| v.to_string());
        let style = if highlight.contains(&v) { ", shape=box, style=filled" } else { "" };
        let _ = writeln!(s, "  {v} [label=\"{label}\"{style}];");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(s, "  {u} -- {v};");
    }
    s.push_str("}\n");
    s
}

/// One vertex id per line.
pub fn parse_subspace(g: &MetricGraph, text: &str) -> Result<Subspace> {
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if comment_or_blank(line) {
            continue;
        }
        ids.push(parse_vertex(line.trim(), i + 1)?);
    }
    Subspace::new(g, ids)
}

/// A family file: a JSON array of vertex-id arrays.
pub fn parse_family(g: &MetricGraph, text: &str) -> Result<Vec<Subspace>> {
    let raw: Vec<Vec<Vertex>> = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), e.to_string()))?;
    raw.into_iter().map(|m| Subspace::new(g, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = parse_edge_list("# square\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(parse_edge_list(&to_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = parse_edge_list("0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }));
        let err = parse_edge_list("0 1\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }));
    }

    #[test]
    fn json_with_labels() {
        let g = parse_graph(r#"{"n":2,"edges":[[0,1]],"labels":{"0":"e","1":"a"}}"#).unwrap();
        assert_eq!(g.label(1), Some("a"));
        let back = serde_json::to_string(&to_json(&g)).unwrap();
        assert_eq!(parse_graph(&back).unwrap(), g);
    }
}
