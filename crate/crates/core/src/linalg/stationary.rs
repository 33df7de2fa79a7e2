use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TELEPORTATION: f64 = 0.85;

/// Probability vector over nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution(Vec<f64>);

impl StationaryDistribution {
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for StationaryDistribution {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkProcess {
    /// Random walk on an undirected graph: proportional to strength.
    UndirectedWalk,
    /// Walk driven by the combinatorial Laplacian: uniform.
    Combinatorial,
    /// Random walk that follows an out-edge with probability `lambda` and
    /// otherwise jumps to a uniformly random node.
    TeleportingWalk { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

pub fn stationary_distribution(graph: &Graph, process: WalkProcess) -> Result<StationaryDistribution> {
    let n = graph.n_nodes();
    match process {
        WalkProcess::Combinatorial => Ok(StationaryDistribution(vec![1.0 / n as f64; n])),
        WalkProcess::UndirectedWalk => {
            if graph.is_directed() {
                return Err(Error::InvalidGraph(
                    "undirected walk requested on a directed graph".into(),
                ));
            }
            let strengths = graph.degrees().out_strength;
            if let Some(node) = strengths.iter().position(|&d| d <= 0.0) {
                return Err(Error::IsolatedNode(node));
            }
            let components = graph.connected_components().len();
            if components > 1 {
                return Err(Error::Disconnected { components });
            }
            let total: f64 = strengths.iter().sum();
            Ok(StationaryDistribution(
                strengths.into_iter().map(|d| d / total).collect(),
            ))
        }
        WalkProcess::TeleportingWalk { lambda } => {
            TeleportingWalk::new(graph, lambda)?.stationary(PowerIteration::default())
        }
    }
}

/// Transition matrix `M = λ D_out⁻¹ A + (1 - λ) 11ᵀ/N`, where rows of nodes
/// without out-edges are replaced by the uniform distribution.
///
/// Kept factored: the sparse part `λ D_out⁻¹ A` plus, per row, the mass that
/// is spread uniformly.
#[derive(Debug, Clone)]
pub struct TeleportingWalk {
    lambda: f64,
    /// `λ D_out⁻¹ A` with empty rows for dangling nodes.
    follow: SparseMatrix,
    /// Row `i` of `M` adds `uniform_mass[i] / N` to every column.
    uniform_mass: Vec<f64>,
}

impl TeleportingWalk {
    pub fn new(graph: &Graph, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "teleportation lambda must lie in (0, 1), got {lambda}"
            )));
        }
        if graph.is_signed() {
            return Err(Error::InvalidGraph(
                "teleporting random walk needs non-negative weights".into(),
            ));
        }
        let out = graph.degrees().out_strength;
        let scale: Vec<f64> = out
            .iter()
            .map(|&d| if d > 0.0 { lambda / d } else { 0.0 })
            .collect();
        let uniform_mass = out
            .iter()
            .map(|&d| if d > 0.0 { 1.0 - lambda } else { 1.0 })
            .collect();
        Ok(TeleportingWalk {
            lambda,
            follow: graph.adjacency().scale_rows(&scale),
            uniform_mass,
        })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.uniform_mass.len()
    }

    /// Sparse part `λ D_out⁻¹ A` (dangling rows empty).
    pub fn follow_part(&self) -> &SparseMatrix {
        &self.follow
    }

    /// Per-row mass spread uniformly over all nodes.
    pub fn uniform_mass(&self) -> &[f64] {
        &self.uniform_mass
    }

    /// `xᵀ M`.
    pub fn left_apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n_nodes() as f64;
        let mut out = self.follow.left_mul_vec(x);
        let spread: f64 = x.iter().zip(&self.uniform_mass).map(|(a, b)| a * b).sum::<f64>() / n;
        out.iter_mut().for_each(|v| *v += spread);
        out
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n_nodes();
        let mut m = self.follow.to_dense();
        for i in 0..n {
            let extra = self.uniform_mass[i] / n as f64;
            for j in 0..n {
                m[(i, j)] += extra;
            }
        }
        m
    }

    pub fn stationary(&self, settings: PowerIteration) -> Result<StationaryDistribution> {
        let n = self.n_nodes();
        let mut pi = vec![1.0 / n as f64; n];
        let mut residual = f64::INFINITY;
        for _ in 0..settings.max_iterations {
            let mut next = self.left_apply(&pi);
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|v| *v /= total);
            residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if residual <= settings.tolerance {
                return Ok(StationaryDistribution(pi));
            }
        }
        Err(Error::NonConvergence {
            iterations: settings.max_iterations,
            residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], false).unwrap()
    }

    #[test]
    fn triangle_undirected_walk_is_uniform() {
        let pi = stationary_distribution(&triangle(), WalkProcess::UndirectedWalk).unwrap();
        for p in pi.iter() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn combinatorial_is_uniform() {
        let g = Graph::from_edges(4, [(0, 1, 5.0), (1, 2, 1.0), (2, 3, 0.1)], false).unwrap();
        let pi = stationary_distribution(&g, WalkProcess::Combinatorial).unwrap();
        assert_eq!(pi.as_slice(), &[0.25; 4]);
    }

    #[test]
    fn directed_cycle_teleport_is_uniform() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], true).unwrap();
        let pi =
            stationary_distribution(&g, WalkProcess::TeleportingWalk { lambda: 0.85 }).unwrap();
        for p in pi.iter() {
            assert!((p - 1.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn dangling_rows_are_uniform() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0)], true).unwrap();
        let m = TeleportingWalk::new(&g, 0.85).unwrap().dense();
        for j in 0..3 {
            assert!((m[(2, j)] - 1.0 / 3.0).abs() < 1e-15);
        }
        for i in 0..3 {
            let row: f64 = m.row(i).sum();
            assert!((row - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn teleport_preconditions() {
        let g = triangle();
        assert!(TeleportingWalk::new(&g, 0.0).is_err());
        assert!(TeleportingWalk::new(&g, 1.0).is_err());
        let signed = Graph::from_edges(2, [(0, 1, -1.0)], true).unwrap();
        assert!(TeleportingWalk::new(&signed, 0.5).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 5.0)], true).unwrap();
        let walk = TeleportingWalk::new(&g, 0.99).unwrap();
        let err = walk
            .stationary(PowerIteration {
                tolerance: 1e-12,
                max_iterations: 2,
            })
            .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 2, .. }));
    }

    #[test]
    fn undirected_walk_preconditions() {
        let split = Graph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)], false).unwrap();
        assert!(matches!(
            stationary_distribution(&split, WalkProcess::UndirectedWalk),
            Err(Error::Disconnected { .. })
        ));
    }
}
