//! Shared fixtures for benchmarks.

use multistab_core::analysis::cross_nvi;
use multistab_core::graph::{multiscale_sbm, SbmParams};
use multistab_core::optimizer::GeneralizedQualityMatrix;
use multistab_core::{build, ConstructorKind, Graph, Partition, QualityInstance};

/// Constant-degree SBM with `n` nodes (a multiple of 90).
pub fn sbm(n: usize) -> Graph {
    let params = SbmParams::constant_degree(n).expect("size is a multiple of 90");
    multiscale_sbm(&params, 7).expect("valid parameters").0
}

pub fn instance(kind: ConstructorKind, graph: &Graph, t: f64) -> QualityInstance {
    build(kind, graph, t, &Default::default()).expect("compatible graph")
}

pub fn quality_matrix(kind: ConstructorKind, graph: &Graph, t: f64) -> GeneralizedQualityMatrix {
    GeneralizedQualityMatrix::from_instance(&instance(kind, graph, t))
}

/// `count` pseudo-random partitions of `n` nodes into about `k` groups.
pub fn partitions(n: usize, k: usize, count: usize) -> Vec<Partition> {
    (0..count)
        .map(|c| {
            let labels: Vec<usize> = (0..n).map(|i| (i * 2654435761 + c * 40503) % 97 % k).collect();
            Partition::from_labels(&labels)
        })
        .collect()
}

/// Cross-NVI matrix of a synthetic scan with `n_scale` scales.
pub fn cross_matrix(n: usize, n_scale: usize) -> Vec<Vec<f64>> {
    let parts: Vec<Partition> = (0..n_scale)
        .map(|s| {
            let k = 2 + s * 3;
            Partition::from_labels(&(0..n).map(|i| i * k / n).collect::<Vec<_>>())
        })
        .collect();
    cross_nvi(&parts).expect("equal lengths")
}
