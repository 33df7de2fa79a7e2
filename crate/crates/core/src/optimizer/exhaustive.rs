use crate::constructors::QualityInstance;
use crate::error::{Error, Result};
use crate::partition::Partition;

use super::quality::{evaluate_quality, GeneralizedQualityMatrix};

/// Bell(12) = 4 213 597 partitions is the practical ceiling.
pub const MAX_EXHAUSTIVE_NODES: usize = 12;

/// Global maximizer by enumerating every set partition as a restricted
/// growth string, in lexicographic order. The first maximizer wins ties.
pub fn exhaustive_argmax(instance: &QualityInstance) -> Result<(Partition, f64)> {
    let n = instance.n_nodes();
    if n > MAX_EXHAUSTIVE_NODES {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_EXHAUSTIVE_NODES,
        });
    }
    let b = GeneralizedQualityMatrix::from_instance(instance).dense();
    let mut search = Search {
        b: &b,
        labels: vec![0; n],
        best_labels: vec![0; n],
        best_value: f64::NEG_INFINITY,
    };
    search.descend(0, 0, 0.0);
    let partition = Partition::from_labels(&search.best_labels);
    let quality = evaluate_quality(instance, &partition)?;
    Ok((partition, quality))
}

struct Search<'a> {
    b: &'a nalgebra::DMatrix<f64>,
    labels: Vec<usize>,
    best_labels: Vec<usize>,
    best_value: f64,
}

impl Search<'_> {
    fn descend(&mut self, node: usize, used: usize, value: f64) {
        let n = self.labels.len();
        if node == n {
            if value > self.best_value {
                self.best_value = value;
                self.best_labels.copy_from_slice(&self.labels);
            }
            return;
        }
        for c in 0..=used {
            let mut delta = self.b[(node, node)];
            for j in 0..node {
                if self.labels[j] == c {
                    delta += 2.0 * self.b[(node, j)];
                }
            }
            self.labels[node] = c;
            self.descend(node + 1, used.max(c + 1), value + delta);
        }
    }
}
