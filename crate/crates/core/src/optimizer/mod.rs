//! Evaluation and maximization of the generalized Markov Stability objective.

mod exhaustive;
mod louvain;
mod quality;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use exhaustive::{exhaustive_argmax, MAX_EXHAUSTIVE_NODES};
pub use louvain::{louvain_with, LouvainOptions, MoveEvent, DEFAULT_GAIN_TOLERANCE};
pub use quality::{evaluate_quality, GeneralizedQualityMatrix};

use crate::constructors::QualityInstance;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Louvain with default options. The returned quality is
/// [`evaluate_quality`] of the returned partition.
pub fn louvain(instance: &QualityInstance, seed: u64) -> Result<(Partition, f64)> {
    let matrix = GeneralizedQualityMatrix::from_instance(instance);
    let (partition, _) = louvain_with(&matrix, seed, &LouvainOptions::default(), &mut |_| {})?;
    let quality = evaluate_quality(instance, &partition)?;
    Ok((partition, quality))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    #[default]
    Louvain,
    /// Declared for interface compatibility; not implemented.
    Leiden,
}

impl OptimizerKind {
    pub fn optimize(
        self,
        matrix: &GeneralizedQualityMatrix,
        seed: u64,
        options: &LouvainOptions,
    ) -> Result<(Partition, f64)> {
        match self {
            OptimizerKind::Louvain => louvain_with(matrix, seed, options, &mut |_| {}),
            OptimizerKind::Leiden => Err(Error::NotSupported(
                "the Leiden optimizer is not implemented; use louvain".into(),
            )),
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerKind::Louvain => "louvain",
            OptimizerKind::Leiden => "leiden",
        })
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "louvain" => Ok(OptimizerKind::Louvain),
            "leiden" => Ok(OptimizerKind::Leiden),
            other => Err(Error::InvalidConfig(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build, ConstructorKind};
    use crate::graph::Graph;

    #[test]
    fn leiden_is_not_supported() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)], false).unwrap();
        let inst = build(ConstructorKind::Linearized, &g, 1.0, &Default::default()).unwrap();
        let m = GeneralizedQualityMatrix::from_instance(&inst);
        assert!(matches!(
            OptimizerKind::Leiden.optimize(&m, 0, &Default::default()),
            Err(Error::NotSupported(_))
        ));
        assert!(OptimizerKind::Louvain.optimize(&m, 0, &Default::default()).is_ok());
    }

    #[test]
    fn single_edge_matches_oracle() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)], false).unwrap();
        let inst = build(ConstructorKind::Linearized, &g, 1.0, &Default::default()).unwrap();
        let (p, q) = louvain(&inst, 0).unwrap();
        let (op, oq) = exhaustive_argmax(&inst).unwrap();
        assert_eq!(p, op);
        assert_eq!(q, oq);
    }

    #[test]
    fn four_cycle_never_beats_oracle() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)], false)
            .unwrap();
        let inst = build(ConstructorKind::Linearized, &g, 0.3, &Default::default()).unwrap();
        let (_, best) = exhaustive_argmax(&inst).unwrap();
        for seed in 0..20 {
            let (_, q) = louvain(&inst, seed).unwrap();
            assert!(q <= best + 1e-12, "seed {seed}: {q} > {best}");
        }
    }
}
