//! Numerical kernels: sparse storage, Laplacians, matrix exponential and
//! stationary distributions.

mod expm;
mod laplacian;
mod sparse;
mod stationary;

pub use expm::{expm, matrix_exponential};
pub use laplacian::{laplacian, LaplacianKind};
pub use sparse::SparseMatrix;
pub use stationary::{
    stationary_distribution, PowerIteration, StationaryDistribution, TeleportingWalk, WalkProcess,
    DEFAULT_TELEPORTATION,
};
