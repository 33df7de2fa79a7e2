use serde::{Deserialize, Serialize};

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    /// `D - A`.
    Combinatorial,
    /// `I - D⁻¹A`, using out-strengths.
    RandomWalk,
    /// `D_abs⁻¹ (D_abs - A)` with absolute strengths.
    Signed,
}

pub fn laplacian(graph: &Graph, kind: LaplacianKind) -> Result<SparseMatrix> {
    let n = graph.n_nodes();
    let adjacency = graph.adjacency();
    let strengths = graph.degrees();
    match kind {
        LaplacianKind::Combinatorial => {
            let degree = SparseMatrix::from_sorted_unique(
                n,
                n,
                strengths.out_strength.iter().enumerate().map(|(i, &d)| (i, i, d)),
            );
            degree.add_scaled(1.0, &adjacency, -1.0)
        }
        LaplacianKind::RandomWalk => {
            if let Some(node) = strengths.out_strength.iter().position(|&d| d <= 0.0) {
                return Err(Error::IsolatedNode(node));
            }
            let components = graph.connected_components().len();
            if components > 1 {
                return Err(Error::Disconnected { components });
            }
            let inv: Vec<f64> = strengths.out_strength.iter().map(|d| 1.0 / d).collect();
            SparseMatrix::identity(n).add_scaled(1.0, &adjacency.scale_rows(&inv), -1.0)
        }
        LaplacianKind::Signed => {
            if let Some(node) = strengths.abs_strength.iter().position(|&d| d <= 0.0) {
                return Err(Error::IsolatedNode(node));
            }
            let inv: Vec<f64> = strengths.abs_strength.iter().map(|d| 1.0 / d).collect();
            SparseMatrix::identity(n).add_scaled(1.0, &adjacency.scale_rows(&inv), -1.0)
        }
    }
}
