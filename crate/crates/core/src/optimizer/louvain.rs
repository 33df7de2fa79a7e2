//! Louvain optimization of the generalized objective.
//!
//! Moving node `i` (null entries `x_k = v_{2k-1,i}`, `y_k = v_{2k,i}`) into
//! community `C` after removing it from its own community changes the
//! objective by `2 S_{i,C} - Σ_k (a_k(C) y_k + x_k b_k(C))` up to terms that
//! do not depend on `C`, where `S` is the symmetric part of `F` without the
//! diagonal and `a_k`, `b_k` are per-community sums of the null vectors.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::quality::GeneralizedQualityMatrix;
use crate::error::{Error, Result};
use crate::partition::Partition;

pub const DEFAULT_GAIN_TOLERANCE: f64 = 1e-10;
const MAX_PASSES_PER_LEVEL: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOptions {
    /// Moves must improve the objective by more than this.
    pub gain_tolerance: f64,
    /// Processes the graph as if node `node_order[k]` were node `k`.
    /// `None` is the identity.
    pub node_order: Option<Vec<usize>>,
}

impl Default for LouvainOptions {
    fn default() -> Self {
        LouvainOptions {
            gain_tolerance: DEFAULT_GAIN_TOLERANCE,
            node_order: None,
        }
    }
}

/// One accepted local move. `node`, `from` and `to` index the nodes and
/// communities of the current aggregation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveEvent {
    pub level: usize,
    pub node: usize,
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

/// One aggregation level: symmetric off-diagonal weights plus null vectors.
struct Level {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    weights: Vec<f64>,
    null: Vec<Vec<f64>>,
}

impl Level {
    fn n(&self) -> usize {
        self.indptr.len() - 1
    }

    fn from_matrix(matrix: &GeneralizedQualityMatrix, order: &[usize]) -> Self {
        let s = matrix.symmetric_part();
        let n = s.n_rows();
        let mut rank = vec![0; n];
        for (k, &node) in order.iter().enumerate() {
            rank[node] = k;
        }
        let mut indptr = Vec::with_capacity(n + 1);
        indptr.push(0);
        let mut indices = Vec::with_capacity(s.nnz());
        let mut weights = Vec::with_capacity(s.nnz());
        let mut row: Vec<(usize, f64)> = Vec::new();
        for &node in order {
            row.clear();
            row.extend(
                s.row(node)
                    .filter(|&(j, _)| j != node)
                    .map(|(j, w)| (rank[j], w)),
            );
            row.sort_unstable_by_key(|&(j, _)| j);
            for &(j, w) in &row {
                indices.push(j);
                weights.push(w);
            }
            indptr.push(indices.len());
        }
        let null = matrix
            .null_vectors()
            .iter()
            .map(|v| order.iter().map(|&node| v[node]).collect())
            .collect();
        Level {
            indptr,
            indices,
            weights,
            null,
        }
    }

    /// Collapses communities (labels `0..k`) into single nodes.
    fn aggregate(&self, labels: &[usize], k: usize) -> Level {
        let mut members = vec![Vec::new(); k];
        for (node, &c) in labels.iter().enumerate() {
            members[c].push(node);
        }
        let mut acc = vec![0.0; k];
        let mut seen = vec![false; k];
        let mut touched = Vec::new();
        let mut indptr = Vec::with_capacity(k + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        for (c, nodes) in members.iter().enumerate() {
            for &i in nodes {
                for e in self.indptr[i]..self.indptr[i + 1] {
                    let d = labels[self.indices[e]];
                    if d == c {
                        continue;
                    }
                    if !seen[d] {
                        seen[d] = true;
                        touched.push(d);
                    }
                    acc[d] += self.weights[e];
                }
            }
            touched.sort_unstable();
            for &d in &touched {
                indices.push(d);
                weights.push(acc[d]);
                acc[d] = 0.0;
                seen[d] = false;
            }
            touched.clear();
            indptr.push(indices.len());
        }
        let null = self
            .null
            .iter()
            .map(|v| {
                let mut sums = vec![0.0; k];
                for (node, &c) in labels.iter().enumerate() {
                    sums[c] += v[node];
                }
                sums
            })
            .collect();
        Level {
            indptr,
            indices,
            weights,
            null,
        }
    }
}

/// Greedy two-phase Louvain. Deterministic for a given seed and options.
pub fn louvain_with(
    matrix: &GeneralizedQualityMatrix,
    seed: u64,
    options: &LouvainOptions,
    observer: &mut dyn FnMut(&MoveEvent),
) -> Result<(Partition, f64)> {
    let n = matrix.n_nodes();
    let order: Vec<usize> = match &options.node_order {
        Some(order) => {
            validate_order(order, n)?;
            order.clone()
        }
        None => (0..n).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_matrix(matrix, &order);
    // community of each (reordered) original node at the current level
    let mut membership: Vec<usize> = (0..n).collect();
    let mut depth = 0;
    loop {
        let (labels, k, moved) = local_moves(&level, depth, options.gain_tolerance, &mut rng, observer);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = labels[*m];
        }
        level = level.aggregate(&labels, k);
        depth += 1;
    }
    let mut assignment = vec![0; n];
    for (k, &node) in order.iter().enumerate() {
        assignment[node] = membership[k];
    }
    let partition = Partition::from_labels(&assignment);
    let quality = matrix.evaluate(&partition)?;
    Ok((partition, quality))
}

fn validate_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &node in order {
        if node >= n || std::mem::replace(&mut seen[node], true) {
            return Err(Error::InvalidConfig("node order is not a permutation".into()));
        }
    }
    Ok(())
}

/// Phase one: repeated seeded sweeps of single-node moves. Returns
/// canonical community labels, their count, and whether anything moved.
fn local_moves(
    level: &Level,
    depth: usize,
    tolerance: f64,
    rng: &mut ChaCha8Rng,
    observer: &mut dyn FnMut(&MoveEvent),
) -> (Vec<usize>, usize, bool) {
    let n = level.n();
    let n_pairs = level.null.len() / 2;
    let mut community: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut sums: Vec<Vec<f64>> = level.null.clone();
    let mut free: Vec<usize> = Vec::new();
    let mut link = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut moved_any = false;

    let gain = |c: usize, link_c: f64, sums: &[Vec<f64>], i: usize| -> f64 {
        let mut g = 2.0 * link_c;
        for p in 0..n_pairs {
            g -= sums[2 * p][c] * level.null[2 * p + 1][i] + level.null[2 * p][i] * sums[2 * p + 1][c];
        }
        g
    };

    for _ in 0..MAX_PASSES_PER_LEVEL {
        order.shuffle(rng);
        let mut moves = 0;
        for &i in &order {
            for e in level.indptr[i]..level.indptr[i + 1] {
                let c = community[level.indices[e]];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                link[c] += level.weights[e];
            }
            let own = community[i];
            for (v, s) in sums.iter_mut().enumerate() {
                s[own] -= level.null[v][i];
            }
            size[own] -= 1;

            let base = gain(own, link[own], &sums, i);
            let mut best = own;
            let mut best_gain = base;
            for &c in &touched {
                if c == own {
                    continue;
                }
                let g = gain(c, link[c], &sums, i);
                if g > best_gain {
                    best = c;
                    best_gain = g;
                }
            }
            // an empty community scores exactly 0
            let mut to_empty = false;
            if size[own] > 0 && 0.0 > best_gain {
                best_gain = 0.0;
                to_empty = true;
            }

            let target = if (to_empty || best != own) && best_gain - base > tolerance {
                let target = if to_empty {
                    free.pop().expect("a community is empty when one holds several nodes")
                } else {
                    best
                };
                observer(&MoveEvent {
                    level: depth,
                    node: i,
                    from: own,
                    to: target,
                    gain: best_gain - base,
                });
                moves += 1;
                target
            } else {
                own
            };

            community[i] = target;
            size[target] += 1;
            for (v, s) in sums.iter_mut().enumerate() {
                s[target] += level.null[v][i];
            }
            if size[own] == 0 {
                for s in sums.iter_mut() {
                    s[own] = 0.0;
                }
                free.push(own);
            }

            for &c in &touched {
                link[c] = 0.0;
                seen[c] = false;
            }
            touched.clear();
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }

    let mut relabel = vec![usize::MAX; n];
    let mut k = 0;
    let labels = community
        .iter()
        .map(|&c| {
            if relabel[c] == usize::MAX {
                relabel[c] = k;
                k += 1;
            }
            relabel[c]
        })
        .collect();
    (labels, k, moved_any)
}
