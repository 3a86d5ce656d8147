//! The semi-flat model metric on the torus fibration over a Monge-Ampère
//! base, with collapse and special Lagrangian diagnostics.
//!
//! Over a base point `x` with Hessian `H = D²φ(x)` the metric is
//! `g = Σ H_ij (dx_i dx_j + dθ_i dθ_j)` and the Kähler form is
//! `ω = Σ H_ij dx_i ∧ dθ_j`. The angles `θ_j` are periodic with period
//! `2π / (-log t)`.

mod geodesic;
mod gh;
mod metric;
mod slag;
mod torus;

pub use geodesic::{base_distance, base_distance_with, segment_length};
pub use gh::{
    base_point, gh_discrepancy, gh_discrepancy_with, random_pairs, GhReport, PairReport, TotalPoint,
};
pub use metric::{
    einstein_samples, ricci_residual, ricci_residual_with, semiflat_metric, SemiflatMetric,
    RICCI_NORMALIZATION,
};
pub use slag::{special_defect, special_phase, AffineTorus, FlatLimitData, SpecialDefect};
pub use torus::{covering_radius, fiber_diameter, torus_diameter, torus_distance};

use thiserror::Error;

use crate::ma::MaError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiflatError {
    #[error("parameter t must lie in (0,1), got {0}")]
    DegenerateParameter(f64),
    #[error("point {point:?} is too close to the boundary (slack {slack:e}, need {required:e})")]
    BoundaryTooClose {
        point: Vec<f64>,
        slack: f64,
        required: f64,
    },
    #[error("base dimension {0} not supported by this operation")]
    UnsupportedDimension(usize),
    #[error("holomorphic volume form coefficient is zero")]
    ZeroForm,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Ma(#[from] MaError),
}
