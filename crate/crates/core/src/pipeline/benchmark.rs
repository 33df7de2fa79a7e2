use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{cross_nvi, ensemble_nvi, postprocess, EnsembleMember, ScaleResult, ScaleSelection, ScanResult};
use crate::constructors::{BuiltinFamily, ConstructorKind, ConstructorOptions, QualityInstance, ScaleFamily};
use crate::error::{Error, Result};
use crate::graph::{multiscale_sbm, SbmParams};
use crate::optimizer::{evaluate_quality, louvain_with, GeneralizedQualityMatrix, LouvainOptions};
use crate::partition::Partition;

use super::svg::{Axis, Panel, Svg};
use super::ScanConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    pub runs_per_scale: usize,
    pub n_scales: usize,
    pub min_scale: f64,
    pub max_scale: f64,
    pub n_nvi: usize,
    pub seed: u64,
    pub constructor_options: ConstructorOptions,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            runs_per_scale: 50,
            n_scales: 10,
            min_scale: -2.0,
            max_scale: 0.5,
            n_nvi: 20,
            seed: 0,
            constructor_options: ConstructorOptions::default(),
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub build: f64,
    /// `None` for constructors without a matrix exponential.
    pub exponential: Option<f64>,
    pub louvain: f64,
    pub nvi: f64,
    pub postprocess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub times: StageTimes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub constructor: ConstructorKind,
    pub options: BenchmarkOptions,
    pub rows: Vec<BenchmarkRow>,
    /// Least-squares slope of log(Louvain time) against log(E); needs two sizes.
    pub louvain_slope: Option<f64>,
}

/// Times every scan stage on constant-degree SBM graphs of the given sizes,
/// on a single worker thread.
pub fn benchmark(kind: ConstructorKind, sizes: &[usize], options: &BenchmarkOptions) -> Result<BenchmarkReport> {
    if sizes.is_empty() {
        return Err(Error::InvalidConfig("no benchmark sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig("benchmark sizes must be strictly increasing".into()));
    }
    if options.runs_per_scale == 0 || options.n_scales < 2 || options.n_nvi == 0 {
        return Err(Error::InvalidConfig(
            "runs_per_scale and n_nvi must be at least 1 and n_scales at least 2".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start benchmark worker: {e}")))?;
    let rows = pool.install(|| {
        sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| time_size(kind, n, options.seed.wrapping_add(i as u64), options))
            .collect::<Result<Vec<_>>>()
    })?;
    let louvain_slope = fit_slope(
        &rows.iter().map(|r| r.n_edges as f64).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.times.louvain).collect::<Vec<_>>(),
    );
    Ok(BenchmarkReport {
        constructor: kind,
        options: options.clone(),
        rows,
        louvain_slope,
    })
}

fn time_size(kind: ConstructorKind, n: usize, seed: u64, options: &BenchmarkOptions) -> Result<BenchmarkRow> {
    let (graph, _) = multiscale_sbm(&SbmParams::constant_degree(n)?, seed)?;
    let config = ScanConfig {
        min_scale: options.min_scale,
        max_scale: options.max_scale,
        n_scale: options.n_scales,
        ..ScanConfig::default()
    };
    let log_scales = config.log_scales();

    let start = Instant::now();
    let family = BuiltinFamily::prepare(kind, &graph, &options.constructor_options)?;
    let mut build = start.elapsed().as_secs_f64();
    let mut exponential = family.exponential_family().map(|_| 0.0);
    let mut instances: Vec<QualityInstance> = Vec::with_capacity(log_scales.len());
    let mut matrices = Vec::with_capacity(log_scales.len());
    for &log_t in &log_scales {
        let t = 10f64.powf(log_t);
        let instance = match family.exponential_family() {
            Some(e) => {
                let start = Instant::now();
                let kernel = e.exponential(t)?;
                *exponential.as_mut().expect("set for exponential kinds") += start.elapsed().as_secs_f64();
                let start = Instant::now();
                let instance = e.assemble(t, kernel)?;
                build += start.elapsed().as_secs_f64();
                instance
            }
            None => {
                let start = Instant::now();
                let instance = family.at_scale(t)?;
                build += start.elapsed().as_secs_f64();
                instance
            }
        };
        let start = Instant::now();
        matrices.push(GeneralizedQualityMatrix::from_instance(&instance));
        build += start.elapsed().as_secs_f64();
        instances.push(instance);
    }

    let lopts = LouvainOptions::default();
    let start = Instant::now();
    let mut ensembles: Vec<Vec<EnsembleMember>> = Vec::with_capacity(log_scales.len());
    for (s, (matrix, instance)) in matrices.iter().zip(&instances).enumerate() {
        let mut members = Vec::with_capacity(options.runs_per_scale);
        for k in 0..options.runs_per_scale {
            let run_seed = seed.wrapping_add((s * options.runs_per_scale + k) as u64);
            let (partition, _) = louvain_with(matrix, run_seed, &lopts, &mut |_| {})?;
            let quality = evaluate_quality(instance, &partition)?;
            members.push(EnsembleMember { partition, quality });
        }
        ensembles.push(members);
    }
    let louvain = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let mut scales = Vec::with_capacity(log_scales.len());
    for (s, members) in ensembles.into_iter().enumerate() {
        let partitions: Vec<Partition> = members.iter().map(|m| m.partition.clone()).collect();
        let nvi = ensemble_nvi(&partitions, options.n_nvi, seed.wrapping_add(s as u64))?;
        scales.push(ScaleResult::from_ensemble(s, log_scales[s], members, nvi).expect("non-empty ensemble"));
    }
    let bests: Vec<Partition> = scales.iter().map(|s| s.best_partition.clone()).collect();
    let cross = cross_nvi(&bests)?;
    let nvi = start.elapsed().as_secs_f64();

    let scan = ScanResult {
        config,
        scales,
        cross_nvi: cross,
        block_nvi: Vec::new(),
        selection: ScaleSelection::default(),
        postprocess_passes: 0,
    };
    let start = Instant::now();
    postprocess(scan, &instances)?;
    let postprocess = start.elapsed().as_secs_f64();

    log::info!("benchmark N={n}: E={}, louvain {louvain:.3}s", graph.n_edges());
    Ok(BenchmarkRow {
        n_nodes: n,
        n_edges: graph.n_edges(),
        times: StageTimes {
            build,
            exponential,
            louvain,
            nvi,
            postprocess,
        },
    })
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Log-log plot of stage times against E, with an O(E) reference line
/// through the first Louvain point.
pub fn render_benchmark(report: &BenchmarkReport) -> String {
    let stages: [(&str, &str, Box<dyn Fn(&StageTimes) -> Option<f64>>); 5] = [
        ("build", "#1f5fa8", Box::new(|t| Some(t.build))),
        ("exponential", "#c0392b", Box::new(|t| t.exponential)),
        ("louvain", "#27864a", Box::new(|t| Some(t.louvain))),
        ("nvi", "#d9731a", Box::new(|t| Some(t.nvi))),
        ("postprocess", "#7b2d8e", Box::new(|t| Some(t.postprocess))),
    ];
    let xs: Vec<f64> = report.rows.iter().map(|r| (r.n_edges.max(1) as f64).log10()).collect();
    let mut all_y = Vec::new();
    for row in &report.rows {
        for (_, _, get) in &stages {
            if let Some(v) = get(&row.times).filter(|&v| v > 0.0) {
                all_y.push(v.log10());
            }
        }
    }
    let mut svg = Svg::new(720.0, 480.0);
    let x_axis = Axis::fit(xs.iter().cloned(), 0.0, 1.0);
    let y_axis = Axis::fit(all_y.iter().cloned(), 0.0, 1.0);
    let p = Panel::new(80.0, 40.0, 480.0, 360.0, (x_axis.lo, x_axis.hi), (y_axis.lo, y_axis.hi));
    p.frame(
        &mut svg,
        &format!("Stage times, {}", report.constructor),
        "log10 E",
        "log10 seconds",
    );
    for (k, (name, color, get)) in stages.iter().enumerate() {
        let pts: Vec<(f64, f64)> = report
            .rows
            .iter()
            .zip(&xs)
            .filter_map(|(r, &x)| get(&r.times).filter(|&v| v > 0.0).map(|v| p.point(x, v.log10())))
            .collect();
        if pts.is_empty() {
            continue;
        }
        svg.polyline(&pts, &format!(r#"class="stage-{name}" stroke="{color}" stroke-width="1.5""#));
        for &(px, py) in &pts {
            svg.circle(px, py, 3.0, &format!(r#"fill="{color}""#));
        }
        let ly = 60.0 + 18.0 * k as f64;
        svg.line(580.0, ly, 600.0, ly, &format!(r#"stroke="{color}" stroke-width="2""#));
        svg.text(605.0, ly + 4.0, name, "");
    }
    if let (Some(row), Some(&x0)) = (report.rows.first(), xs.first()) {
        if row.times.louvain > 0.0 {
            let y0 = row.times.louvain.log10();
            let x1 = x_axis.hi;
            let (a, b) = (p.point(x0, y0), p.point(x1, y0 + (x1 - x0)));
            svg.line(a.0, a.1, b.0, b.1, r#"class="reference-line" stroke="black" stroke-dasharray="6 4""#);
            let ly = 60.0 + 18.0 * stages.len() as f64;
            svg.line(580.0, ly, 600.0, ly, r#"stroke="black" stroke-dasharray="6 4""#);
            svg.text(605.0, ly + 4.0, "O(E)", "");
        }
    }
    svg.finish()
}

pub fn plot_benchmark(report: &BenchmarkReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_benchmark(report))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [10.0, 100.0, 1000.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.2)).collect();
        assert!((fit_slope(&x, &y).unwrap() - 1.2).abs() < 1e-12);
        assert_eq!(fit_slope(&[10.0], &[1.0]), None);
    }

    #[test]
    fn single_size_has_no_fit() {
        let opts = BenchmarkOptions {
            runs_per_scale: 2,
            n_scales: 3,
            ..Default::default()
        };
        let r = benchmark(ConstructorKind::Linearized, &[90], &opts).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.louvain_slope.is_none());
        assert!(r.rows[0].times.exponential.is_none());
        assert!(render_benchmark(&r).contains("reference-line"));
    }

    #[test]
    fn bad_sizes() {
        let o = BenchmarkOptions::default();
        assert!(benchmark(ConstructorKind::Linearized, &[], &o).is_err());
        assert!(benchmark(ConstructorKind::Linearized, &[180, 90], &o).is_err());
        assert!(benchmark(ConstructorKind::Linearized, &[100], &o).is_err());
    }
}
