//! Scan orchestration, configuration, persistence, plotting and benchmarks.

mod benchmark;
mod config;
mod plot;
mod results;
mod scan;
mod svg;

pub use benchmark::{
    benchmark, fit_slope, plot_benchmark, render_benchmark, BenchmarkOptions, BenchmarkReport,
    BenchmarkRow, StageTimes,
};
pub use config::{ScanConfig, WORKERS_ENV};
pub use plot::{plot_summary, render_summary};
pub use results::{load_results, read_results, save_results, write_results, RESULTS_FORMAT, RESULTS_VERSION};
pub use scan::{run_scan, run_scan_with};
