//! Mumford degenerations of toric varieties and their dual intersection
//! complexes.
//!
//! Input is a lattice polytope `P ⊂ ℝⁿ` with a polyhedral decomposition and a
//! convex piecewise-linear function `ψ` with integral slopes. The lifted
//! polyhedron `{(v, r) : ψ(v) ≤ r}` has one lower facet per maximal cell
//! `τ`, with inner normal `n_τ = (-m_τ, 1)` where `m_τ` is the slope of `ψ`
//! on `τ`. The central fibre is the union of the toric varieties `X_τ`; its
//! strata are the faces `F` of the decomposition cut out by the maximal cells
//! containing them, with `dim_ℂ X_F = dim F`. The transverse local cone at a
//! stratum is spanned by the `n_τ` of those cells, and its slice at height
//! one is the dual cell.

mod decomposition;
mod dual;
mod mumford;

pub use decomposition::{Face, PolyDecomposition};
pub use dual::{dual_complex, verify_duality, DualCell, DualComplex, DualityReport, Violation};
pub use mumford::{mumford_degeneration, DegenerationData, LowerFacet, Stratum};

use thiserror::Error;

use crate::toric::ToricError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegenerationError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("decompositions of dimension {0} are not supported (1 or 2)")]
    UnsupportedDimension(usize),
    #[error("vertex {index}: {msg}")]
    BadVertex { index: usize, msg: String },
    #[error("cell {cell}: {msg}")]
    BadCell { cell: usize, msg: String },
    #[error("cells do not tile the polytope: {0}")]
    NotCovering(String),
    #[error("no psi value for vertex {0}")]
    MissingPsi(usize),
    #[error("psi is not affine on cell {cell}")]
    NotAffineOnCell { cell: usize },
    #[error("psi has non-integral slope {slope} on cell {cell}")]
    NonIntegralSlope { cell: usize, slope: String },
    #[error("psi is not strictly convex across facet {facet:?} between cells {cells:?}")]
    NonConvexPsi {
        facet: Vec<usize>,
        cells: (usize, usize),
    },
    #[error("stratum over face {face:?} has a non-simplicial local cone")]
    NonSimplicialStratum { face: Vec<usize> },
    #[error("stratum over face {face:?} is not Gorenstein: {reason}")]
    NotGorensteinLocally { face: Vec<usize>, reason: String },
    #[error(transparent)]
    Toric(#[from] ToricError),
}
