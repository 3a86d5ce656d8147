//! Exact lattice and simplicial cone combinatorics, the logarithm map and the
//! torus-fibration base domain.
//!
//! No floating point enters the cone arithmetic. Integrality questions such
//! as whether a cone is Gorenstein are decided over `BigInt`/`BigRational`.

mod cone;
mod domain;
pub(crate) mod exact;

pub use cone::{
    cell_polytope, dual_cone, gorenstein_covector, CellPolytope, Cone, Covector, Lattice,
};
pub use domain::{fibration_base, log_map, SimplexDomain};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToricError {
    #[error("lattice rank must be at least 1")]
    ZeroRank,
    #[error("ray {index} has {got} entries, lattice rank is {rank}")]
    ArityMismatch {
        index: usize,
        got: usize,
        rank: usize,
    },
    #[error("ray {0} is the zero vector")]
    ZeroRay(usize),
    #[error("cone has no rays")]
    NoRays,
    #[error("rays are linearly dependent")]
    NonSimplicial,
    #[error("rays span a proper sublattice of rank {span} < {rank}")]
    NotFullDimensional { span: usize, rank: usize },
    #[error("no integral covector pairs to 1 with every ray (rational solution {0})")]
    NotGorenstein(String),
    #[error("parameter t must lie in (0,1), got {0}")]
    DegenerateParameter(f64),
    #[error("modulus {index} is not positive: {value}")]
    NonPositiveModulus { index: usize, value: f64 },
    #[error("eps must lie in (0,1], got {0}")]
    BadEpsilon(f64),
    #[error("margin {margin} leaves the {dim}-simplex empty (needs < {bound})")]
    EmptyDomain { dim: usize, margin: f64, bound: f64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
