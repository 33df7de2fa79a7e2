#![allow(dead_code)]

use multistab_core::{Graph, Partition};
use rand::Rng;

/// Symmetric dense adjacency built straight from an undirected edge list.
pub fn dense_adjacency(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        if i != j {
            a[j][i] += w;
        }
    }
    a
}

/// Random spanning tree (or directed cycle) plus random extra edges, with
/// weights in [0.1, 2).
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, directed: bool) -> Graph {
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    if directed {
        for k in 0..n {
            edges.push((order[k], order[(k + 1) % n], rng.random_range(0.1..2.0)));
        }
    } else {
        for k in 1..n {
            let parent = order[rng.random_range(0..k)];
            edges.push((parent, order[k], rng.random_range(0.1..2.0)));
        }
    }
    let extra = rng.random_range(0..=2 * n);
    for _ in 0..extra {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            edges.push((i, j, rng.random_range(0.1..2.0)));
        }
    }
    Graph::from_edges(n, edges, directed).unwrap()
}

pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let k = rng.random_range(1..=n.max(1));
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels)
}

/// `exp(s A)` by a truncated Taylor series.
pub fn taylor_expm(a: &[Vec<f64>], s: f64, terms: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut result: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    let mut term = result.clone();
    for k in 1..terms {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for m in 0..n {
                let t = term[i][m];
                if t != 0.0 {
                    for j in 0..n {
                        next[i][j] += t * a[m][j] * s / k as f64;
                    }
                }
            }
        }
        term = next;
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    result
}
