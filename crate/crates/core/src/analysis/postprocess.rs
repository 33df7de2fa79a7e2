use std::collections::HashMap;

use crate::constructors::QualityInstance;
use crate::error::{Error, Result};
use crate::optimizer::evaluate_quality;
use crate::partition::Partition;

use super::ScanResult;

/// Cross-scale post-processing: every scale tries the best partition of every
/// other scale and keeps it when it scores strictly higher there. Repeats
/// until nothing changes. Returns the scan with `postprocess_passes` set.
///
/// `instances[i]` must be the quality instance of scale `i`.
pub fn postprocess(scan: ScanResult, instances: &[QualityInstance]) -> Result<ScanResult> {
    if instances.len() != scan.scales.len() {
        return Err(Error::DimensionMismatch {
            expected: scan.scales.len(),
            found: instances.len(),
        });
    }
    postprocess_with(scan, |scale, partition| evaluate_quality(&instances[scale], partition))
}

/// As [`postprocess`], with a caller-supplied `evaluate(scale_index, partition)`.
pub fn postprocess_with<E>(mut scan: ScanResult, mut evaluate: E) -> Result<ScanResult>
where
    E: FnMut(usize, &Partition) -> Result<f64>,
{
    let n = scan.scales.len();
    // Candidates are always the bests held at entry, identified by index.
    let candidates: Vec<(Partition, usize)> = scan
        .scales
        .iter()
        .map(|s| (s.best_partition.clone(), s.best_source))
        .collect();
    let mut holding: Vec<usize> = (0..n).collect();
    let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut passes = 0;

    while passes < n.max(1) {
        let mut pool = holding.clone();
        pool.sort_unstable();
        pool.dedup();
        passes += 1;
        let mut changed = false;
        for (i, result) in scan.scales.iter_mut().enumerate() {
            let mut best = (holding[i], result.best_quality);
            for &c in &pool {
                if c == holding[i] {
                    continue;
                }
                let q = match cache.get(&(i, c)) {
                    Some(&q) => q,
                    None => {
                        let q = evaluate(i, &candidates[c].0)?;
                        cache.insert((i, c), q);
                        q
                    }
                };
                if q > best.1 {
                    best = (c, q);
                }
            }
            if best.0 != holding[i] {
                holding[i] = best.0;
                result.best_quality = best.1;
                result.best_partition = candidates[best.0].0.clone();
                result.best_source = candidates[best.0].1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    scan.postprocess_passes = passes;
    Ok(scan)
}
