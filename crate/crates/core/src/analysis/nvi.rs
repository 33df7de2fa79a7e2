use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Normalized variation of information,
/// `(2 H(X,Y) - H(X) - H(Y)) / H(X,Y)`, with natural-log entropies.
///
/// Lies in `[0, 1]`; zero when both partitions are the single cluster.
pub fn nvi(p: &Partition, q: &Partition) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if p == q || p.is_empty() {
        return Ok(0.0);
    }
    let n = p.len() as f64;
    let cq = q.n_communities();
    let mut joint: Vec<usize> = p
        .assignment()
        .iter()
        .zip(q.assignment())
        .map(|(&a, &b)| a * cq + b)
        .collect();
    joint.sort_unstable();

    let h_joint = entropy(joint.chunk_by(|a, b| a == b).map(<[usize]>::len).collect(), n);
    if h_joint == 0.0 {
        return Ok(0.0);
    }
    let h_p = entropy(p.community_sizes(), n);
    let h_q = entropy(q.community_sizes(), n);
    Ok(((2.0 * h_joint - (h_p + h_q)) / h_joint).clamp(0.0, 1.0))
}

/// Entropy of a count vector; counts are summed in sorted order so the result
/// does not depend on label order.
fn entropy(mut counts: Vec<usize>, n: f64) -> f64 {
    counts.sort_unstable();
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let prob = c as f64 / n;
            -prob * prob.ln()
        })
        .sum()
}

/// Mean pairwise NVI over a seeded random subset of at most `n_nvi`
/// partitions drawn without replacement.
pub fn ensemble_nvi(ensemble: &[Partition], n_nvi: usize, seed: u64) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidConfig("ensemble is empty".into()));
    }
    let take = n_nvi.min(ensemble.len());
    if take < 2 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = index::sample(&mut rng, ensemble.len(), take).into_vec();
    chosen.sort_unstable();
    let pairs: Vec<(usize, usize)> = (0..take)
        .flat_map(|a| ((a + 1)..take).map(move |b| (a, b)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(a, b)| nvi(&ensemble[chosen[a]], &ensemble[chosen[b]]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Symmetric matrix of pairwise NVI, zero on the diagonal.
pub fn cross_nvi(partitions: &[Partition]) -> Result<Vec<Vec<f64>>> {
    let n = partitions.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(a, b)| nvi(&partitions[a], &partitions[b]))
        .collect::<Result<Vec<f64>>>()?;
    let mut matrix = vec![vec![0.0; n]; n];
    for (&(a, b), v) in pairs.iter().zip(values) {
        matrix[a][b] = v;
        matrix[b][a] = v;
    }
    Ok(matrix)
}
