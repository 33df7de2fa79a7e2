//! Quality matrices `F(t)` and null models for the generalized Markov
//! Stability objective
//!
//! ```text
//! Q(t, H) = shift(t) + Tr[ Hᵀ (F(t) - Σ_k v_{2k-1} v_{2k}ᵀ) H ]
//! ```
//!
//! Every built-in constructor is split into a scale-independent preparation
//! step (Laplacians, stationary distributions) and a cheap per-scale step,
//! so a scan over many scales prepares once.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{
    expm, laplacian, LaplacianKind, SparseMatrix, TeleportingWalk, DEFAULT_TELEPORTATION,
};

pub const DEFAULT_EXP_DENSE_THRESHOLD: usize = 2048;

/// Node similarity matrix, dense for exponential kernels and sparse for
/// linearized ones.
#[derive(Debug, Clone, PartialEq)]
pub enum QualityMatrix {
    Dense(DMatrix<f64>),
    Sparse(SparseMatrix),
}

impl QualityMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            QualityMatrix::Dense(m) => m.shape(),
            QualityMatrix::Sparse(m) => (m.n_rows(), m.n_cols()),
        }
    }

    pub fn sum(&self) -> f64 {
        match self {
            QualityMatrix::Dense(m) => m.sum(),
            QualityMatrix::Sparse(m) => m.sum(),
        }
    }

    /// Calls `f(i, j, F_ij)` for every stored entry.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        match self {
            QualityMatrix::Dense(m) => {
                // column-major storage
                for (j, col) in m.column_iter().enumerate() {
                    for (i, &v) in col.iter().enumerate() {
                        f(i, j, v);
                    }
                }
            }
            QualityMatrix::Sparse(m) => m.triplets().for_each(|(i, j, v)| f(i, j, v)),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            QualityMatrix::Dense(m) => m.clone(),
            QualityMatrix::Sparse(m) => m.to_dense(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            QualityMatrix::Dense(m) => m.iter().all(|v| v.is_finite()),
            QualityMatrix::Sparse(m) => m.triplets().all(|(_, _, v)| v.is_finite()),
        }
    }
}

/// Low-rank null model `Σ_k v_{2k-1} v_{2k}ᵀ` plus a partition-independent
/// additive constant.
#[derive(Debug, Clone, PartialEq)]
pub struct NullModel {
    /// `v_1, v_2, ..., v_{2m}`.
    pub vectors: Vec<Vec<f64>>,
    pub global_shift: f64,
}

impl NullModel {
    pub fn new(vectors: Vec<Vec<f64>>, global_shift: f64) -> Self {
        NullModel {
            vectors,
            global_shift,
        }
    }

    /// `v1 = v2 = p`.
    pub fn rank_one(p: Vec<f64>, global_shift: f64) -> Self {
        NullModel::new(vec![p.clone(), p], global_shift)
    }

    pub fn rank(&self) -> usize {
        self.vectors.len() / 2
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.vectors
            .chunks_exact(2)
            .map(|pair| (pair[0].as_slice(), pair[1].as_slice()))
    }
}

/// One member of the scale-parametrized family: `F(t)` and its null model.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityInstance {
    scale: f64,
    matrix: QualityMatrix,
    null_model: NullModel,
}

impl QualityInstance {
    /// Validates shapes and finiteness.
    pub fn new(scale: f64, matrix: QualityMatrix, null_model: NullModel) -> Result<Self> {
        let invariant = |msg: String| Err(Error::ConstructorInvariant(msg));
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return invariant(format!("quality matrix is {rows}x{cols}, not square"));
        }
        if rows == 0 {
            return invariant("quality matrix is empty".into());
        }
        if null_model.vectors.is_empty() || null_model.vectors.len() % 2 != 0 {
            return invariant(format!(
                "null model needs a positive even number of vectors, got {}",
                null_model.vectors.len()
            ));
        }
        if let Some(v) = null_model.vectors.iter().find(|v| v.len() != rows) {
            return invariant(format!(
                "null vector has length {}, quality matrix is {rows}x{rows}",
                v.len()
            ));
        }
        if !matrix.is_finite()
            || !null_model.global_shift.is_finite()
            || null_model.vectors.iter().flatten().any(|v| !v.is_finite())
        {
            return invariant("non-finite entry in quality matrix or null model".into());
        }
        if !scale.is_finite() {
            return invariant(format!("scale {scale} is not finite"));
        }
        Ok(QualityInstance {
            scale,
            matrix,
            null_model,
        })
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.matrix.shape().0
    }

    #[inline]
    pub fn matrix(&self) -> &QualityMatrix {
        &self.matrix
    }

    #[inline]
    pub fn null_model(&self) -> &NullModel {
        &self.null_model
    }

    /// `Σ_ij F_ij`.
    pub fn total_mass(&self) -> f64 {
        self.matrix.sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructorKind {
    /// Heat kernel of the random-walk Laplacian.
    ContinuousNormalized,
    /// Heat kernel of the combinatorial Laplacian.
    ContinuousCombinatorial,
    /// Modularity with resolution.
    Linearized,
    /// Heat kernel of the teleporting random walk.
    Directed,
    /// First-order expansion of the teleporting walk kernel.
    LinearizedDirected,
    /// Heat kernel of the signed Laplacian.
    Signed,
    /// Signed modularity with resolution.
    SignedModularity,
}

impl ConstructorKind {
    pub const ALL: [ConstructorKind; 7] = [
        ConstructorKind::ContinuousNormalized,
        ConstructorKind::ContinuousCombinatorial,
        ConstructorKind::Linearized,
        ConstructorKind::Directed,
        ConstructorKind::LinearizedDirected,
        ConstructorKind::Signed,
        ConstructorKind::SignedModularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructorKind::ContinuousNormalized => "continuous_normalized",
            ConstructorKind::ContinuousCombinatorial => "continuous_combinatorial",
            ConstructorKind::Linearized => "linearized",
            ConstructorKind::Directed => "directed",
            ConstructorKind::LinearizedDirected => "linearized_directed",
            ConstructorKind::Signed => "signed",
            ConstructorKind::SignedModularity => "signed_modularity",
        }
    }

    /// Whether the kind needs a dense matrix exponential.
    pub fn uses_exponential(self) -> bool {
        matches!(
            self,
            ConstructorKind::ContinuousNormalized
                | ConstructorKind::ContinuousCombinatorial
                | ConstructorKind::Directed
                | ConstructorKind::Signed
        )
    }

    fn accepts_signed(self) -> bool {
        matches!(self, ConstructorKind::Signed | ConstructorKind::SignedModularity)
    }

    fn accepts_directed(self) -> bool {
        matches!(
            self,
            ConstructorKind::Directed | ConstructorKind::LinearizedDirected
        )
    }
}

impl fmt::Display for ConstructorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstructorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownConstructor(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructorOptions {
    pub teleportation_lambda: f64,
    pub exp_dense_threshold: usize,
    /// Divide combinatorial time by the mean strength.
    pub combinatorial_rescale: bool,
}

impl Default for ConstructorOptions {
    fn default() -> Self {
        ConstructorOptions {
            teleportation_lambda: DEFAULT_TELEPORTATION,
            exp_dense_threshold: DEFAULT_EXP_DENSE_THRESHOLD,
            combinatorial_rescale: true,
        }
    }
}

/// A prepared constructor: produces the instance at any scale.
pub trait ScaleFamily: Send + Sync {
    fn n_nodes(&self) -> usize;

    fn at_scale(&self, t: f64) -> Result<QualityInstance>;
}

/// Factory of scale families. Implement this for custom quality functions
/// that benefit from per-graph preparation; plain closures can be registered
/// with [`ConstructorRegistry::register`].
pub trait Constructor: Send + Sync {
    fn prepare(&self, graph: &Graph, options: &ConstructorOptions) -> Result<Box<dyn ScaleFamily>>;
}

impl Constructor for ConstructorKind {
    fn prepare(&self, graph: &Graph, options: &ConstructorOptions) -> Result<Box<dyn ScaleFamily>> {
        Ok(Box::new(BuiltinFamily::prepare(*self, graph, options)?))
    }
}

/// Builds the instance of a built-in kind at a single scale.
pub fn build(
    kind: ConstructorKind,
    graph: &Graph,
    t: f64,
    options: &ConstructorOptions,
) -> Result<QualityInstance> {
    BuiltinFamily::prepare(kind, graph, options)?.at_scale(t)
}

/// Prepared state of a built-in constructor.
#[derive(Debug, Clone)]
pub enum BuiltinFamily {
    Exponential(ExponentialFamily),
    Linear(LinearFamily),
}

/// `F(t) = diag(w) exp(-G t c)` with a fixed null model.
#[derive(Debug, Clone)]
pub struct ExponentialFamily {
    generator: DMatrix<f64>,
    time_factor: f64,
    row_weights: Vec<f64>,
    null_vectors: Vec<Vec<f64>>,
}

/// `F(t) = t B`, shift `1 - t`, with an optional null pair whose first
/// vector scales with `t`.
#[derive(Debug, Clone)]
pub struct LinearFamily {
    base: SparseMatrix,
    null_vectors: Vec<Vec<f64>>,
    scaled_pair: Option<(Vec<f64>, Vec<f64>)>,
}

impl BuiltinFamily {
    pub fn prepare(kind: ConstructorKind, graph: &Graph, options: &ConstructorOptions) -> Result<Self> {
        check_compatible(kind, graph, options)?;
        let n = graph.n_nodes();
        let family = match kind {
            ConstructorKind::ContinuousNormalized => {
                let l = laplacian(graph, LaplacianKind::RandomWalk)?;
                let pi = strength_distribution(&graph.degrees().out_strength, kind)?;
                BuiltinFamily::Exponential(ExponentialFamily {
                    generator: l.to_dense(),
                    time_factor: 1.0,
                    null_vectors: vec![pi.clone(), pi.clone()],
                    row_weights: pi,
                })
            }
            ConstructorKind::ContinuousCombinatorial => {
                let components = graph.connected_components().len();
                if components > 1 {
                    log::warn!(
                        "graph has {components} connected components; the combinatorial kernel never mixes between them"
                    );
                }
                let l = laplacian(graph, LaplacianKind::Combinatorial)?;
                let time_factor = if options.combinatorial_rescale {
                    let mean = graph.degrees().out_strength.iter().sum::<f64>() / n as f64;
                    if mean <= 0.0 {
                        return Err(incompatible(kind, "graph has no edges"));
                    }
                    1.0 / mean
                } else {
                    1.0
                };
                let uniform = vec![1.0 / n as f64; n];
                BuiltinFamily::Exponential(ExponentialFamily {
                    generator: l.to_dense(),
                    time_factor,
                    null_vectors: vec![uniform.clone(), uniform.clone()],
                    row_weights: uniform,
                })
            }
            ConstructorKind::Linearized => {
                let strengths = graph.degrees().out_strength;
                let total: f64 = strengths.iter().sum();
                if total <= 0.0 {
                    return Err(incompatible(kind, "graph has no edges"));
                }
                let pi: Vec<f64> = strengths.iter().map(|d| d / total).collect();
                BuiltinFamily::Linear(LinearFamily {
                    base: graph.adjacency().scaled(1.0 / total),
                    null_vectors: vec![pi.clone(), pi],
                    scaled_pair: None,
                })
            }
            ConstructorKind::Directed => {
                let walk = TeleportingWalk::new(graph, options.teleportation_lambda)?;
                let pi = walk.stationary(Default::default())?.into_inner();
                let generator = DMatrix::<f64>::identity(n, n) - walk.dense();
                BuiltinFamily::Exponential(ExponentialFamily {
                    generator,
                    time_factor: 1.0,
                    null_vectors: vec![pi.clone(), pi.clone()],
                    row_weights: pi,
                })
            }
            ConstructorKind::LinearizedDirected => {
                // Π M = Π (λ D⁻¹A) + w 1ᵀ; the rank-one teleportation term is
                // carried as a negated null pair so F stays sparse.
                let walk = TeleportingWalk::new(graph, options.teleportation_lambda)?;
                let pi = walk.stationary(Default::default())?.into_inner();
                let base = walk.follow_part().scale_rows(&pi);
                let spread: Vec<f64> = pi
                    .iter()
                    .zip(walk.uniform_mass())
                    .map(|(p, m)| -p * m / n as f64)
                    .collect();
                BuiltinFamily::Linear(LinearFamily {
                    base,
                    null_vectors: vec![pi.clone(), pi],
                    scaled_pair: Some((spread, vec![1.0; n])),
                })
            }
            ConstructorKind::Signed => {
                let l = laplacian(graph, LaplacianKind::Signed)?;
                let abs = graph.degrees().abs_strength;
                let total: f64 = abs.iter().sum();
                BuiltinFamily::Exponential(ExponentialFamily {
                    generator: l.to_dense(),
                    time_factor: 1.0,
                    null_vectors: signed_null_vectors(graph),
                    row_weights: abs.iter().map(|d| d / total).collect(),
                })
            }
            ConstructorKind::SignedModularity => {
                let total: f64 = graph.degrees().abs_strength.iter().sum();
                if total <= 0.0 {
                    return Err(incompatible(kind, "graph has no edges"));
                }
                BuiltinFamily::Linear(LinearFamily {
                    base: graph.adjacency().scaled(1.0 / total),
                    null_vectors: signed_null_vectors(graph),
                    scaled_pair: None,
                })
            }
        };
        Ok(family)
    }

    pub fn exponential_family(&self) -> Option<&ExponentialFamily> {
        match self {
            BuiltinFamily::Exponential(e) => Some(e),
            BuiltinFamily::Linear(_) => None,
        }
    }
}

impl ScaleFamily for BuiltinFamily {
    fn n_nodes(&self) -> usize {
        match self {
            BuiltinFamily::Exponential(e) => e.row_weights.len(),
            BuiltinFamily::Linear(l) => l.base.n_rows(),
        }
    }

    fn at_scale(&self, t: f64) -> Result<QualityInstance> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidConfig(format!("scale must be positive, got {t}")));
        }
        match self {
            BuiltinFamily::Exponential(e) => e.assemble(t, e.exponential(t)?),
            BuiltinFamily::Linear(l) => l.at_scale(t),
        }
    }
}

impl ExponentialFamily {
    /// `exp(-G t c)`: the expensive, dense step.
    pub fn exponential(&self, t: f64) -> Result<DMatrix<f64>> {
        expm(&(&self.generator * (-t * self.time_factor)))
    }

    /// Combines a kernel from [`Self::exponential`] into the instance.
    pub fn assemble(&self, t: f64, mut kernel: DMatrix<f64>) -> Result<QualityInstance> {
        for (i, mut row) in kernel.row_iter_mut().enumerate() {
            row *= self.row_weights[i];
        }
        QualityInstance::new(
            t,
            QualityMatrix::Dense(kernel),
            NullModel::new(self.null_vectors.clone(), 0.0),
        )
    }
}

impl LinearFamily {
    fn at_scale(&self, t: f64) -> Result<QualityInstance> {
        let mut vectors = self.null_vectors.clone();
        if let Some((scaled, fixed)) = &self.scaled_pair {
            vectors.push(scaled.iter().map(|v| v * t).collect());
            vectors.push(fixed.clone());
        }
        QualityInstance::new(
            t,
            QualityMatrix::Sparse(self.base.scaled(t)),
            NullModel::new(vectors, 1.0 - t),
        )
    }
}

/// Rank-two signed null model: subtracts
/// `(s⁺s⁺ᵀ/2w⁺ - s⁻s⁻ᵀ/2w⁻) / (2w⁺ + 2w⁻)`, with the normalization split
/// evenly between the two vectors of each pair.
fn signed_null_vectors(graph: &Graph) -> Vec<Vec<f64>> {
    let n = graph.n_nodes();
    let mut pos = vec![0.0; n];
    let mut neg = vec![0.0; n];
    for e in graph.edges() {
        if e.weight > 0.0 {
            pos[e.source] += e.weight;
        } else {
            neg[e.source] -= e.weight;
        }
    }
    let pos_total: f64 = pos.iter().sum();
    let neg_total: f64 = neg.iter().sum();
    let total = pos_total + neg_total;
    let pair = |s: &[f64], part: f64, sign: f64| -> (Vec<f64>, Vec<f64>) {
        if part <= 0.0 {
            return (vec![0.0; n], vec![0.0; n]);
        }
        let norm = (part * total).sqrt();
        (
            s.iter().map(|v| sign * v / norm).collect(),
            s.iter().map(|v| v / norm).collect(),
        )
    };
    let (v1, v2) = pair(&pos, pos_total, 1.0);
    let (v3, v4) = pair(&neg, neg_total, -1.0);
    vec![v1, v2, v3, v4]
}

fn strength_distribution(strengths: &[f64], kind: ConstructorKind) -> Result<Vec<f64>> {
    let total: f64 = strengths.iter().sum();
    if total <= 0.0 {
        return Err(incompatible(kind, "graph has no edges"));
    }
    Ok(strengths.iter().map(|d| d / total).collect())
}

fn check_compatible(kind: ConstructorKind, graph: &Graph, options: &ConstructorOptions) -> Result<()> {
    if graph.is_signed() && !kind.accepts_signed() {
        return Err(incompatible(kind, "graph has negative weights"));
    }
    if graph.is_directed() && !kind.accepts_directed() {
        return Err(incompatible(kind, "graph is directed"));
    }
    if kind.uses_exponential() && graph.n_nodes() > options.exp_dense_threshold {
        return Err(Error::TooLarge {
            n: graph.n_nodes(),
            threshold: options.exp_dense_threshold,
        });
    }
    Ok(())
}

fn incompatible(kind: ConstructorKind, reason: &str) -> Error {
    Error::IncompatibleGraph {
        kind: kind.name().to_string(),
        reason: reason.to_string(),
    }
}

/// Proof of a successful registration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationHandle {
    name: String,
}

impl RegistrationHandle {
    pub fn name(&self) -> &str {
        &self.name
    }
}

type Factory = dyn Fn(&Graph, f64, &ConstructorOptions) -> Result<QualityInstance> + Send + Sync;

struct FactoryConstructor(Arc<Factory>);

struct FactoryFamily {
    factory: Arc<Factory>,
    graph: Graph,
    options: ConstructorOptions,
}

impl Constructor for FactoryConstructor {
    fn prepare(&self, graph: &Graph, options: &ConstructorOptions) -> Result<Box<dyn ScaleFamily>> {
        Ok(Box::new(FactoryFamily {
            factory: Arc::clone(&self.0),
            graph: graph.clone(),
            options: *options,
        }))
    }
}

impl ScaleFamily for FactoryFamily {
    fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    fn at_scale(&self, t: f64) -> Result<QualityInstance> {
        (self.factory)(&self.graph, t, &self.options)
    }
}

/// Name-based lookup of built-in and user-defined constructors.
///
/// Registration happens up front; lookups take `&self` and may run
/// concurrently.
#[derive(Default)]
pub struct ConstructorRegistry {
    custom: HashMap<String, Arc<dyn Constructor>>,
}

impl fmt::Debug for ConstructorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.custom.keys().collect();
        names.sort();
        f.debug_struct("ConstructorRegistry")
            .field("custom", &names)
            .finish()
    }
}

impl ConstructorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a per-scale builder `(graph, t, options) -> instance`.
    pub fn register<F>(&mut self, name: &str, factory: F) -> Result<RegistrationHandle>
    where
        F: Fn(&Graph, f64, &ConstructorOptions) -> Result<QualityInstance> + Send + Sync + 'static,
    {
        self.register_constructor(name, Arc::new(FactoryConstructor(Arc::new(factory))))
    }

    pub fn register_constructor(
        &mut self,
        name: &str,
        constructor: Arc<dyn Constructor>,
    ) -> Result<RegistrationHandle> {
        if ConstructorKind::from_str(name).is_ok() || self.custom.contains_key(name) {
            return Err(Error::DuplicateConstructor(name.to_string()));
        }
        self.custom.insert(name.to_string(), constructor);
        Ok(RegistrationHandle {
            name: name.to_string(),
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        ConstructorKind::from_str(name).is_ok() || self.custom.contains_key(name)
    }

    /// Prepares the named constructor; custom families are wrapped so that
    /// every produced instance is checked against the graph size.
    pub fn prepare(
        &self,
        name: &str,
        graph: &Graph,
        options: &ConstructorOptions,
    ) -> Result<Box<dyn ScaleFamily>> {
        if let Ok(kind) = ConstructorKind::from_str(name) {
            return kind.prepare(graph, options);
        }
        let constructor = self
            .custom
            .get(name)
            .ok_or_else(|| Error::UnknownConstructor(name.to_string()))?;
        Ok(Box::new(CheckedFamily {
            inner: constructor.prepare(graph, options)?,
            n_nodes: graph.n_nodes(),
        }))
    }

    pub fn build(
        &self,
        name: &str,
        graph: &Graph,
        t: f64,
        options: &ConstructorOptions,
    ) -> Result<QualityInstance> {
        self.prepare(name, graph, options)?.at_scale(t)
    }
}

struct CheckedFamily {
    inner: Box<dyn ScaleFamily>,
    n_nodes: usize,
}

impl ScaleFamily for CheckedFamily {
    fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    fn at_scale(&self, t: f64) -> Result<QualityInstance> {
        let instance = self.inner.at_scale(t)?;
        if instance.n_nodes() != self.n_nodes {
            return Err(Error::ConstructorInvariant(format!(
                "quality matrix is {0}x{0} but the graph has {1} nodes",
                instance.n_nodes(),
                self.n_nodes
            )));
        }
        Ok(instance)
    }
}
