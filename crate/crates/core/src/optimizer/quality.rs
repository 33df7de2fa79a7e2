use nalgebra::DMatrix;

use crate::constructors::{QualityInstance, QualityMatrix};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::partition::Partition;

/// `Q(t, H)` evaluated straight from the instance, without forming `H`.
pub fn evaluate_quality(instance: &QualityInstance, partition: &Partition) -> Result<f64> {
    let n = instance.n_nodes();
    if partition.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: partition.len(),
        });
    }
    let labels = partition.assignment();
    let mut within = 0.0;
    instance.matrix().for_each_entry(|i, j, v| {
        if labels[i] == labels[j] {
            within += v;
        }
    });
    let null = instance.null_model();
    Ok(null.global_shift + within - null_term(null.pairs(), partition))
}

fn null_term<'a>(pairs: impl Iterator<Item = (&'a [f64], &'a [f64])>, partition: &Partition) -> f64 {
    let labels = partition.assignment();
    let c = partition.n_communities();
    let mut a = vec![0.0; c];
    let mut b = vec![0.0; c];
    let mut total = 0.0;
    for (left, right) in pairs {
        a.iter_mut().for_each(|x| *x = 0.0);
        b.iter_mut().for_each(|x| *x = 0.0);
        for (i, &label) in labels.iter().enumerate() {
            a[label] += left[i];
            b[label] += right[i];
        }
        total += a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
    }
    total
}

/// Symmetric, factored form of the objective:
/// `B = (F + Fᵀ)/2 - Σ_k (v_{2k-1} v_{2k}ᵀ + v_{2k} v_{2k-1}ᵀ)/2`.
///
/// The `F` part is stored sparse; the null vectors stay factored. Because
/// `Tr[Hᵀ X H] = Tr[Hᵀ Xᵀ H]`, the value of every partition is unchanged.
#[derive(Debug, Clone)]
pub struct GeneralizedQualityMatrix {
    symmetric: SparseMatrix,
    null_vectors: Vec<Vec<f64>>,
    shift: f64,
}

impl GeneralizedQualityMatrix {
    pub fn from_instance(instance: &QualityInstance) -> Self {
        let symmetric = match instance.matrix() {
            QualityMatrix::Dense(f) => {
                let n = f.nrows();
                SparseMatrix::from_sorted_unique(
                    n,
                    n,
                    (0..n).flat_map(|i| (0..n).map(move |j| (i, j, 0.5 * (f[(i, j)] + f[(j, i)])))),
                )
            }
            QualityMatrix::Sparse(f) => {
                let transposed = f.transpose();
                if &transposed == f {
                    f.clone()
                } else {
                    f.add_scaled(0.5, &transposed, 0.5)
                        .expect("transpose has matching shape")
                }
            }
        };
        GeneralizedQualityMatrix {
            symmetric,
            null_vectors: instance.null_model().vectors.clone(),
            shift: instance.null_model().global_shift,
        }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.symmetric.n_rows()
    }

    /// `(F + Fᵀ)/2`.
    pub fn symmetric_part(&self) -> &SparseMatrix {
        &self.symmetric
    }

    pub fn null_vectors(&self) -> &[Vec<f64>] {
        &self.null_vectors
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn evaluate(&self, partition: &Partition) -> Result<f64> {
        let n = self.n_nodes();
        if partition.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: partition.len(),
            });
        }
        let labels = partition.assignment();
        let within: f64 = self
            .symmetric
            .triplets()
            .filter(|&(i, j, _)| labels[i] == labels[j])
            .map(|(_, _, v)| v)
            .sum();
        let pairs = self
            .null_vectors
            .chunks_exact(2)
            .map(|p| (p[0].as_slice(), p[1].as_slice()));
        Ok(self.shift + within - null_term(pairs, partition))
    }

    /// Fully materialized `B`, for tests and small-graph oracles.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut b = self.symmetric.to_dense();
        let n = self.n_nodes();
        for pair in self.null_vectors.chunks_exact(2) {
            for i in 0..n {
                for j in 0..n {
                    b[(i, j)] -= 0.5 * (pair[0][i] * pair[1][j] + pair[1][i] * pair[0][j]);
                }
            }
        }
        b
    }
}
