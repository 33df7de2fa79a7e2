//! Multiscale community detection by maximizing generalized Markov
//! Stability over a grid of scales.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: weighted, directed or signed graphs, edge-list ingestion and
//!   the hierarchical stochastic block model generator;
//! - [`linalg`]: Laplacians, matrix exponential and stationary distributions;
//! - [`constructors`]: per-scale quality matrices and null models;
//! - [`optimizer`]: evaluation and Louvain maximization of the objective;
//! - [`analysis`]: variation of information, cross-scale post-processing and
//!   scale selection;
//! - [`pipeline`]: the end-to-end scan, result files, plots and benchmarks.

pub mod analysis;
pub mod constructors;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod optimizer;
pub mod partition;
pub mod pipeline;

pub use constructors::{
    build, ConstructorKind, ConstructorOptions, ConstructorRegistry, NullModel, QualityInstance,
    QualityMatrix,
};
pub use error::{Error, ErrorCategory, Result};
pub use graph::{load_graph, multiscale_sbm, Graph, GroundTruth, SbmParams};
pub use optimizer::{evaluate_quality, exhaustive_argmax, louvain};
pub use partition::Partition;
pub use analysis::{nvi, ScaleResult, ScanResult};
pub use pipeline::{load_results, run_scan, save_results, ScanConfig};
