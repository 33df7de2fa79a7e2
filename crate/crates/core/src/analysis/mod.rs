//! Robustness measures over a scale scan: NVI, cross-scale post-processing
//! and scale selection.

mod nvi;
mod postprocess;
mod selection;

use serde::{Deserialize, Serialize};

pub use nvi::{cross_nvi, ensemble_nvi, nvi};
pub use postprocess::{postprocess, postprocess_with};
pub use selection::{block_nvi, local_minima, select_scales, Pooling, ScaleSelection, SelectionParams};

use crate::partition::Partition;
use crate::pipeline::ScanConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub partition: Partition,
    pub quality: f64,
}

/// Optimization outcome at one Markov time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub scale: f64,
    pub log_scale: f64,
    pub ensemble: Vec<EnsembleMember>,
    pub best_partition: Partition,
    pub best_quality: f64,
    /// Index of the scale whose optimization produced `best_partition`.
    /// Differs from this scale's own index only after post-processing.
    pub best_source: usize,
    /// Mean pairwise NVI within the ensemble.
    pub nvi: f64,
}

impl ScaleResult {
    /// Picks the highest-quality member; the earliest wins ties.
    pub fn from_ensemble(
        index: usize,
        log_scale: f64,
        ensemble: Vec<EnsembleMember>,
        nvi: f64,
    ) -> Option<Self> {
        let best = ensemble
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (i, m)| match acc {
                Some((_, q)) if q >= m.quality => acc,
                _ => Some((i, m.quality)),
            })?;
        Some(ScaleResult {
            scale: 10f64.powf(log_scale),
            log_scale,
            best_partition: ensemble[best.0].partition.clone(),
            best_quality: best.1,
            best_source: index,
            ensemble,
            nvi,
        })
    }

    pub fn n_communities(&self) -> usize {
        self.best_partition.n_communities()
    }
}

/// A complete multiscale scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub scales: Vec<ScaleResult>,
    /// Pairwise NVI between the best partitions of every two scales.
    pub cross_nvi: Vec<Vec<f64>>,
    pub block_nvi: Vec<f64>,
    pub selection: ScaleSelection,
    pub postprocess_passes: usize,
}

impl ScanResult {
    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn nvi_t(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s.nvi).collect()
    }

    pub fn best_partitions(&self) -> Vec<Partition> {
        self.scales.iter().map(|s| s.best_partition.clone()).collect()
    }

    pub fn selected_partitions(&self) -> Vec<(usize, &Partition)> {
        self.selection
            .selected
            .iter()
            .map(|&i| (i, &self.scales[i].best_partition))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{build, ConstructorKind};
    use crate::graph::Graph;
    use crate::optimizer::evaluate_quality;

    fn member(labels: &[usize], quality: f64) -> EnsembleMember {
        EnsembleMember {
            partition: Partition::from_labels(labels),
            quality,
        }
    }

    #[test]
    fn best_member_keeps_first_on_ties() {
        let r = ScaleResult::from_ensemble(
            0,
            0.0,
            vec![member(&[0, 1], 0.5), member(&[0, 0], 0.7), member(&[0, 1], 0.7)],
            0.0,
        )
        .unwrap();
        assert_eq!(r.best_partition, Partition::all_in_one(2));
        assert_eq!(r.best_quality, 0.7);
        assert!(ScaleResult::from_ensemble(0, 0.0, vec![], 0.0).is_none());
    }

    fn barbell() -> Graph {
        let mut edges = vec![];
        for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)] {
            edges.push((a, b, 1.0));
        }
        Graph::from_edges(6, edges, false).unwrap()
    }

    fn scan_from(instances: &[QualityInstance], bests: &[Partition]) -> ScanResult {
        let scales = bests
            .iter()
            .zip(instances)
            .enumerate()
            .map(|(i, (p, inst))| {
                let q = evaluate_quality(inst, p).unwrap();
                ScaleResult::from_ensemble(i, inst.scale().log10(), vec![EnsembleMember { partition: p.clone(), quality: q }], 0.0)
                    .unwrap()
            })
            .collect();
        ScanResult {
            config: ScanConfig::default(),
            scales,
            cross_nvi: vec![],
            block_nvi: vec![],
            selection: ScaleSelection::default(),
            postprocess_passes: 0,
        }
    }

    use crate::constructors::QualityInstance;

    #[test]
    fn postprocessing_reaches_fixed_point() {
        let g = barbell();
        let times = [0.1, 0.5, 1.0, 2.0];
        let instances: Vec<_> = times
            .iter()
            .map(|&t| build(ConstructorKind::Linearized, &g, t, &Default::default()).unwrap())
            .collect();
        // deliberately poor bests: singletons everywhere but one scale
        let bests = vec![
            Partition::singletons(6),
            Partition::from_labels(&[0, 0, 0, 1, 1, 1]),
            Partition::singletons(6),
            Partition::singletons(6),
        ];
        let scan = scan_from(&instances, &bests);
        let before: Vec<f64> = scan.scales.iter().map(|s| s.best_quality).collect();
        let after = postprocess(scan, &instances).unwrap();
        assert!(after.postprocess_passes <= times.len());
        for (i, s) in after.scales.iter().enumerate() {
            assert!(s.best_quality >= before[i]);
            assert_eq!(s.best_quality, evaluate_quality(&instances[i], &s.best_partition).unwrap());
            for other in &bests {
                assert!(evaluate_quality(&instances[i], other).unwrap() <= s.best_quality);
            }
        }
        // a second run changes nothing
        let again = postprocess(after.clone(), &instances).unwrap();
        assert_eq!(again.postprocess_passes, 1);
        assert_eq!(again.best_partitions(), after.best_partitions());
    }

    #[test]
    fn postprocessing_checks_lengths() {
        let g = barbell();
        let inst = build(ConstructorKind::Linearized, &g, 1.0, &Default::default()).unwrap();
        let scan = scan_from(std::slice::from_ref(&inst), &[Partition::singletons(6)]);
        assert!(postprocess(scan, &[]).is_err());
    }
}
