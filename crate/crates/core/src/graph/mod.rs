//! Graph representation, ingestion and synthetic generators.

mod io;
mod sbm;

pub use io::{load_graph, parse_edge_list, write_edge_list};
pub use sbm::{multiscale_sbm, GroundTruth, SbmParams};

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Immutable weighted graph.
///
/// Undirected graphs store both orientations of every edge (a self-loop is
/// stored once), so `edges()` always lists the nonzero entries of the
/// adjacency matrix. Entries are sorted by `(source, target)` and unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<Edge>,
    directed: bool,
    signed: bool,
}

/// Per-node strengths (weighted degrees).
#[derive(Debug, Clone, PartialEq)]
pub struct Strengths {
    pub out_strength: Vec<f64>,
    pub in_strength: Vec<f64>,
    pub abs_strength: Vec<f64>,
}

impl Graph {
    /// Builds a graph from raw `(source, target, weight)` triples.
    ///
    /// For undirected graphs every triple is an undirected edge and is
    /// mirrored. Duplicate pairs are summed; pairs that sum to zero vanish.
    pub fn from_edges<I>(n_nodes: usize, edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries = Vec::new();
        for (source, target, weight) in edges {
            if source >= n_nodes || target >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({source}, {target}) references a node outside 0..{n_nodes}"
                )));
            }
            if !weight.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({source}, {target}) has non-finite weight {weight}"
                )));
            }
            entries.push((source, target, weight));
            if !directed && source != target {
                entries.push((target, source, weight));
            }
        }
        Self::from_adjacency_entries(n_nodes, entries, directed)
    }

    /// Builds a graph whose adjacency entries are given verbatim. For
    /// undirected graphs the entries must already be symmetric.
    pub(crate) fn from_adjacency_entries(
        n_nodes: usize,
        mut entries: Vec<(usize, usize, f64)>,
        directed: bool,
    ) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        entries.sort_by_key(|&(s, t, _)| (s, t));
        let mut edges: Vec<Edge> = Vec::with_capacity(entries.len());
        for (source, target, weight) in entries {
            match edges.last_mut() {
                Some(last) if last.source == source && last.target == target => {
                    last.weight += weight;
                }
                _ => edges.push(Edge {
                    source,
                    target,
                    weight,
                }),
            }
        }
        edges.retain(|e| e.weight != 0.0);
        let signed = edges.iter().any(|e| e.weight < 0.0);
        let graph = Graph {
            n_nodes,
            edges,
            directed,
            signed,
        };
        if !directed && !graph.has_symmetric_entries() {
            return Err(Error::InvalidGraph(
                "undirected graph has asymmetric adjacency entries".into(),
            ));
        }
        Ok(graph)
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Nonzero adjacency entries, sorted by `(source, target)`.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges counting each undirected edge once.
    pub fn n_edges(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            self.edges.iter().filter(|e| e.source <= e.target).count()
        }
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub(crate) fn has_symmetric_entries(&self) -> bool {
        self.edges.iter().all(|e| {
            self.edges
                .binary_search_by_key(&(e.target, e.source), |f| (f.source, f.target))
                .map(|idx| self.edges[idx].weight == e.weight)
                .unwrap_or(false)
        })
    }

    pub fn adjacency(&self) -> SparseMatrix {
        SparseMatrix::from_sorted_unique(
            self.n_nodes,
            self.n_nodes,
            self.edges.iter().map(|e| (e.source, e.target, e.weight)),
        )
    }

    pub fn degrees(&self) -> Strengths {
        let n = self.n_nodes;
        let mut out_strength = vec![0.0; n];
        let mut in_strength = vec![0.0; n];
        let mut abs_strength = vec![0.0; n];
        for e in &self.edges {
            out_strength[e.source] += e.weight;
            in_strength[e.target] += e.weight;
            abs_strength[e.source] += e.weight.abs();
        }
        Strengths {
            out_strength,
            in_strength,
            abs_strength,
        }
    }

    /// Weakly connected components on the unsigned, undirected skeleton.
    /// Components are listed by smallest member; members are sorted.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n_nodes;
        let mut neighbours = vec![Vec::new(); n];
        for e in &self.edges {
            if e.source != e.target {
                neighbours[e.source].push(e.target);
                neighbours[e.target].push(e.source);
            }
        }
        let mut seen = vec![false; n];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in &neighbours[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Relabels nodes: node `i` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes,
                found: perm.len(),
            });
        }
        let entries = self
            .edges
            .iter()
            .map(|e| (perm[e.source], perm[e.target], e.weight))
            .collect();
        Self::from_adjacency_entries(self.n_nodes, entries, self.directed)
    }
}
