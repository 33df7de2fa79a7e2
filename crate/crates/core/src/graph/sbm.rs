//! Hierarchical (multiscale) stochastic block model.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Expected within-block degree contributed by the finest level.
const FINEST_LEVEL_DEGREE: f64 = 8.1;
/// Each coarser level contributes this fraction of the previous level's degree.
const LEVEL_DEGREE_RATIO: f64 = 2.0 / 3.0;
/// Expected number of edges from a node to nodes outside its coarsest block.
const BACKGROUND_DEGREE: f64 = 0.54;

/// Planted partitions, finest level first.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub levels: Vec<Partition>,
}

impl GroundTruth {
    /// CSV with a `node,level0,level1,...` header and one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.levels.first().map_or(0, Partition::len);
        let header: Vec<String> = (0..self.levels.len()).map(|l| format!("level{l}")).collect();
        writeln!(out, "node,{}", header.join(","))?;
        for node in 0..n {
            write!(out, "{node}")?;
            for level in &self.levels {
                write!(out, ",{}", level.community_of(node))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    pub n_nodes: usize,
    /// Number of blocks per level, finest first.
    pub block_counts: Vec<usize>,
    /// Edge probability for pairs whose finest shared block is at this level.
    pub p_levels: Vec<f64>,
    /// Edge probability for pairs that share no block.
    pub p_out: f64,
}

impl Default for SbmParams {
    /// 270 nodes with 27, 9 and 3 nested blocks.
    fn default() -> Self {
        Self::with_default_densities(270, vec![27, 9, 3])
    }
}

impl SbmParams {
    /// Chooses probabilities so that the expected number of neighbours a node
    /// gains at each level shrinks geometrically from the finest level out,
    /// with a small background degree across the coarsest blocks.
    pub fn with_default_densities(n_nodes: usize, block_counts: Vec<usize>) -> Self {
        let mut p_levels = Vec::with_capacity(block_counts.len());
        let mut inner = 1usize;
        let mut degree = FINEST_LEVEL_DEGREE;
        for &count in &block_counts {
            let size = if count == 0 { 0 } else { n_nodes / count };
            let available = size.saturating_sub(inner);
            p_levels.push(if available == 0 {
                0.0
            } else {
                (degree / available as f64).min(1.0)
            });
            inner = size.max(inner);
            degree *= LEVEL_DEGREE_RATIO;
        }
        let outside = n_nodes.saturating_sub(inner);
        let p_out = if outside == 0 {
            0.0
        } else {
            (BACKGROUND_DEGREE / outside as f64).min(1.0)
        };
        SbmParams {
            n_nodes,
            block_counts,
            p_levels,
            p_out,
        }
    }

    /// Benchmark family: blocks of 10, 30 and 90 nodes with the default
    /// densities, so the expected degree stays constant as `n_nodes` grows.
    pub fn constant_degree(n_nodes: usize) -> Result<Self> {
        if n_nodes == 0 || n_nodes % 90 != 0 {
            return Err(Error::InvalidConfig(format!(
                "benchmark graph sizes must be positive multiples of 90, got {n_nodes}"
            )));
        }
        Ok(Self::with_default_densities(
            n_nodes,
            vec![n_nodes / 10, n_nodes / 30, n_nodes / 90],
        ))
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_nodes == 0 {
            return bad("SBM needs at least one node".into());
        }
        if self.block_counts.is_empty() {
            return bad("SBM needs at least one block level".into());
        }
        if self.p_levels.len() != self.block_counts.len() {
            return bad(format!(
                "{} block levels but {} level probabilities",
                self.block_counts.len(),
                self.p_levels.len()
            ));
        }
        for &count in &self.block_counts {
            if count == 0 || self.n_nodes % count != 0 {
                return bad(format!(
                    "block count {count} does not divide {} nodes",
                    self.n_nodes
                ));
            }
        }
        for pair in self.block_counts.windows(2) {
            if pair[1] >= pair[0] {
                return bad("block counts must be strictly decreasing".into());
            }
            if pair[0] % pair[1] != 0 {
                return bad(format!(
                    "level with {} blocks does not nest inside level with {} blocks",
                    pair[0], pair[1]
                ));
            }
        }
        for &p in self.p_levels.iter().chain(std::iter::once(&self.p_out)) {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("probability {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Samples an undirected, unweighted hierarchical SBM.
///
/// Nodes are assigned to blocks contiguously, so block `b` at a level with
/// `K` blocks holds nodes `b*N/K .. (b+1)*N/K`.
pub fn multiscale_sbm(params: &SbmParams, seed: u64) -> Result<(Graph, GroundTruth)> {
    params.validate()?;
    let n = params.n_nodes;
    let sizes: Vec<usize> = params.block_counts.iter().map(|&k| n / k).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = sizes
                .iter()
                .position(|&size| i / size == j / size)
                .map_or(params.p_out, |level| params.p_levels[level]);
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    let graph = Graph::from_edges(n, edges, false)?;
    let levels = sizes
        .iter()
        .map(|&size| Partition::from_labels(&(0..n).map(|i| i / size).collect::<Vec<_>>()))
        .collect();
    Ok((graph, GroundTruth { levels }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_densities() {
        let p = SbmParams::default();
        assert_eq!(p.block_counts, vec![27, 9, 3]);
        let expected = [0.9, 0.27, 0.06];
        for (got, want) in p.p_levels.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!((p.p_out - 0.003).abs() < 1e-12);
    }

    #[test]
    fn constant_degree_family_matches_default_at_270() {
        assert_eq!(SbmParams::constant_degree(270).unwrap(), SbmParams::default());
        assert!(SbmParams::constant_degree(100).is_err());
        let big = SbmParams::constant_degree(1080).unwrap();
        assert_eq!(big.block_counts, vec![108, 36, 12]);
        assert!((big.p_out * (1080.0 - 90.0) - BACKGROUND_DEGREE).abs() < 1e-12);
    }

    #[test]
    fn two_cliques() {
        let params = SbmParams {
            n_nodes: 4,
            block_counts: vec![2],
            p_levels: vec![1.0],
            p_out: 0.0,
        };
        for seed in [0, 1, 99] {
            let (g, truth) = multiscale_sbm(&params, seed).unwrap();
            let pairs: Vec<_> = g
                .edges()
                .iter()
                .filter(|e| e.source < e.target)
                .map(|e| (e.source, e.target))
                .collect();
            assert_eq!(pairs, vec![(0, 1), (2, 3)]);
            assert_eq!(truth.levels.len(), 1);
            assert_eq!(truth.levels[0].assignment(), &[0, 0, 1, 1]);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let p = SbmParams::default();
        let (a, _) = multiscale_sbm(&p, 3).unwrap();
        let (b, _) = multiscale_sbm(&p, 3).unwrap();
        let (c, _) = multiscale_sbm(&p, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_parameters() {
        let base = SbmParams {
            n_nodes: 12,
            block_counts: vec![4, 2],
            p_levels: vec![0.9, 0.5],
            p_out: 0.05,
        };
        assert!(multiscale_sbm(&base, 0).is_ok());
        let mut p = base.clone();
        p.block_counts = vec![5, 2];
        assert!(multiscale_sbm(&p, 0).is_err());
        let mut p = base.clone();
        p.block_counts = vec![2, 4];
        assert!(multiscale_sbm(&p, 0).is_err());
        let mut p = base.clone();
        p.block_counts = vec![6, 4];
        p.p_levels = vec![0.5, 0.5];
        assert!(multiscale_sbm(&p, 0).is_err(), "6 blocks do not nest in 4");
        let mut p = base.clone();
        p.block_counts.clear();
        p.p_levels.clear();
        assert!(multiscale_sbm(&p, 0).is_err());
        let mut p = base.clone();
        p.p_out = 1.5;
        assert!(multiscale_sbm(&p, 0).is_err());
        let mut p = base;
        p.p_levels = vec![0.9];
        assert!(multiscale_sbm(&p, 0).is_err());
    }

    #[test]
    fn truth_csv() {
        let params = SbmParams {
            n_nodes: 4,
            block_counts: vec![2, 1],
            p_levels: vec![1.0, 0.0],
            p_out: 0.0,
        };
        let (_, truth) = multiscale_sbm(&params, 0).unwrap();
        let mut buf = Vec::new();
        truth.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "node,level0,level1\n0,0,0\n1,0,0\n2,1,0\n3,1,0\n"
        );
    }
}
