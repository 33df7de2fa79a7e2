use rayon::prelude::*;

use crate::analysis::{
    block_nvi, cross_nvi, ensemble_nvi, postprocess, select_scales, EnsembleMember, ScaleResult,
    ScaleSelection, ScanResult,
};
use crate::constructors::{ConstructorRegistry, QualityInstance};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::optimizer::{evaluate_quality, GeneralizedQualityMatrix, LouvainOptions};

use super::ScanConfig;

/// Runs a full scan with the built-in constructors.
pub fn run_scan(graph: &Graph, config: &ScanConfig) -> Result<ScanResult> {
    run_scan_with(graph, config, &ConstructorRegistry::new())
}

/// Runs a full scan, resolving `config.constructor` through `registry`.
pub fn run_scan_with(
    graph: &Graph,
    config: &ScanConfig,
    registry: &ConstructorRegistry,
) -> Result<ScanResult> {
    config.validate()?;
    let workers = config.resolved_workers()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| scan(graph, config, registry))
}

fn scan(graph: &Graph, config: &ScanConfig, registry: &ConstructorRegistry) -> Result<ScanResult> {
    let family = registry.prepare(&config.constructor, graph, &config.constructor_options)?;
    let log_scales = config.log_scales();
    let options = LouvainOptions::default();

    let mut instances: Vec<QualityInstance> = Vec::with_capacity(log_scales.len());
    let mut scales: Vec<ScaleResult> = Vec::with_capacity(log_scales.len());
    for (index, &log_t) in log_scales.iter().enumerate() {
        let instance = family.at_scale(10f64.powf(log_t))?;
        let matrix = GeneralizedQualityMatrix::from_instance(&instance);
        let ensemble = (0..config.n_tries)
            .into_par_iter()
            .map(|k| {
                let (partition, _) = config.optimizer.optimize(&matrix, config.run_seed(index, k), &options)?;
                let quality = evaluate_quality(&instance, &partition)?;
                Ok(EnsembleMember { partition, quality })
            })
            .collect::<Result<Vec<_>>>()?;
        let partitions: Vec<_> = ensemble.iter().map(|m| m.partition.clone()).collect();
        let nvi = ensemble_nvi(&partitions, config.n_nvi, config.seed.wrapping_add(index as u64))?;
        let result = ScaleResult::from_ensemble(index, log_t, ensemble, nvi)
            .expect("n_tries is at least 1");
        log::info!(
            "scale {}/{}: log10 t = {log_t:.3}, {} communities, quality {:.6}, NVI {nvi:.4}",
            index + 1,
            log_scales.len(),
            result.n_communities(),
            result.best_quality,
        );
        scales.push(result);
        instances.push(instance);
    }

    let mut result = ScanResult {
        config: config.clone(),
        cross_nvi: cross_nvi(&scales.iter().map(|s| s.best_partition.clone()).collect::<Vec<_>>())?,
        scales,
        block_nvi: Vec::new(),
        selection: ScaleSelection::default(),
        postprocess_passes: 0,
    };
    if config.with_postprocessing {
        result = postprocess(result, &instances)?;
        log::info!("post-processing converged after {} passes", result.postprocess_passes);
        result.cross_nvi = cross_nvi(&result.best_partitions())?;
    }

    let params = config.selection_params();
    if config.with_scale_selection {
        let (selection, curve) = select_scales(&result.cross_nvi, &result.nvi_t(), &params)?;
        if selection.fallback {
            log::warn!("Block NVI has no local minimum; reporting the global NVI(t) minimum");
        }
        result.selection = selection;
        result.block_nvi = curve;
    } else {
        result.block_nvi = block_nvi(&result.cross_nvi, &params)?;
    }
    Ok(result)
}
