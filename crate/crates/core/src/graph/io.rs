//! Edge-list CSV ingestion.
//!
//! One edge per line as `source,target[,weight]` (weight defaults to 1.0).
//! Lines starting with `#` and blank lines are ignored. An optional header
//! line `nodes=<N> directed=<bool>` may appear before the first edge.
//!
//! Without `directed=true`, the graph is undirected: if the listed entries
//! already form a symmetric adjacency they are taken verbatim, otherwise each
//! line is read as one undirected edge and mirrored.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Default)]
struct Header {
    nodes: Option<usize>,
    directed: Option<bool>,
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header = Header::default();
    let mut raw: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_index: Option<usize> = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("nodes=") || line.starts_with("directed=") {
            if !raw.is_empty() {
                return Err(parse_err(line_no, "header must precede edges"));
            }
            header = parse_header(line, line_no)?;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(
                line_no,
                format!("expected `source,target[,weight]`, got {} fields", fields.len()),
            ));
        }
        let source = parse_index(fields[0], line_no)?;
        let target = parse_index(fields[1], line_no)?;
        let weight = match fields.get(2) {
            Some(w) => w
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("invalid weight `{w}`")))?,
            None => 1.0,
        };
        if !weight.is_finite() {
            return Err(parse_err(line_no, format!("non-finite weight `{weight}`")));
        }
        max_index = Some(max_index.map_or(source.max(target), |m| m.max(source).max(target)));
        raw.push((source, target, weight));
    }

    let inferred = max_index.map_or(0, |m| m + 1);
    let n_nodes = match header.nodes {
        Some(n) if n < inferred => {
            return Err(Error::InvalidGraph(format!(
                "header declares {n} nodes but an edge references node {}",
                inferred - 1
            )))
        }
        Some(n) => n,
        None => inferred,
    };
    if n_nodes == 0 {
        return Err(Error::InvalidGraph("edge list is empty".into()));
    }

    if header.directed == Some(true) {
        return Graph::from_edges(n_nodes, raw, true);
    }
    if is_symmetric(&raw) {
        Graph::from_adjacency_entries(n_nodes, raw, false)
    } else {
        Graph::from_edges(n_nodes, raw, false)
    }
}

/// Writes the graph in the format read by [`load_graph`]. Undirected edges
/// are written once, with `source <= target`.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "nodes={} directed={}",
        graph.n_nodes(),
        graph.is_directed()
    )?;
    for e in graph.edges() {
        if graph.is_directed() || e.source <= e.target {
            writeln!(out, "{},{},{}", e.source, e.target, e.weight)?;
        }
    }
    Ok(())
}

fn is_symmetric(raw: &[(usize, usize, f64)]) -> bool {
    let mut summed: HashMap<(usize, usize), f64> = HashMap::with_capacity(raw.len());
    for &(s, t, w) in raw {
        *summed.entry((s, t)).or_insert(0.0) += w;
    }
    summed
        .iter()
        .all(|(&(s, t), &w)| summed.get(&(t, s)) == Some(&w))
}

fn parse_header(line: &str, line_no: usize) -> Result<Header> {
    let mut header = Header::default();
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed header token `{token}`")))?;
        match key {
            "nodes" => {
                header.nodes = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid node count `{value}`")))?,
                )
            }
            "directed" => {
                header.directed = Some(
                    value
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid flag `{value}`")))?,
                )
            }
            other => return Err(parse_err(line_no, format!("unknown header key `{other}`"))),
        }
    }
    Ok(header)
}

fn parse_index(field: &str, line_no: usize) -> Result<usize> {
    let value: i64 = field
        .parse()
        .map_err(|_| parse_err(line_no, format!("invalid node index `{field}`")))?;
    usize::try_from(value).map_err(|_| parse_err(line_no, format!("negative node index {value}")))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn triangle_is_undirected() {
        let g = parse_edge_list("0,1\n1,2\n2,0").unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.n_edges(), 3);
        assert!(!g.is_directed());
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
    }

    #[test]
    fn duplicate_lines_are_summed() {
        let g = parse_edge_list("0,1,2.5\n0,1,0.5").unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(
            g.edges()[0],
            Edge {
                source: 0,
                target: 1,
                weight: 3.0
            }
        );
    }

    #[test]
    fn negative_weight_marks_signed() {
        assert!(parse_edge_list("0,1,-1.0").unwrap().is_signed());
    }

    #[test]
    fn symmetric_listing_is_not_doubled() {
        let g = parse_edge_list("0,1,2\n1,0,2").unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edges()[0].weight, 2.0);
    }

    #[test]
    fn header_sets_nodes_and_direction() {
        let g = parse_edge_list("# comment\nnodes=5 directed=true\n0,1\n").unwrap();
        assert_eq!(g.n_nodes(), 5);
        assert!(g.is_directed());
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn header_too_small_is_rejected() {
        assert!(parse_edge_list("nodes=2\n0,4").is_err());
    }

    #[test]
    fn errors_report_line_numbers() {
        match parse_edge_list("0,1\n# ok\n0,x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("0,1\n-1,2") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("negative"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0,1,NaN"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0,1,inf"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edge_list("0,1,2,3"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(parse_edge_list("# nothing\n").is_err());
    }
}
