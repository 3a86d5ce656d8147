//! The real Monge-Ampère problem `det D²φ = κ e^{2φ}` on an open simplex with
//! `φ → +∞` on the boundary.
//!
//! Two solve modes are provided.
//!
//! * [`SolveMode::Barrier`] writes `φ = B + ψ` with the barrier
//!   `B = -Σ_{j=0}^{s} log x_j` and solves for the bounded correction `ψ`. On
//!   each face of the simplex `ψ` restricts to the correction of the
//!   lower-dimensional problem on that face, and at the vertices it equals
//!   `-½ log κ`; these traces are computed recursively and imposed as
//!   Dirichlet data. The second derivatives of `B` are analytic, those of
//!   `ψ` are finite differences.
//! * [`SolveMode::Exhaustion`] solves Dirichlet problems with constant
//!   boundary value `M = 4, 8, 12, …` and stops once the solution stops
//!   changing on the interior compact.
//!
//! Both use a damped Newton iteration on the direction stencil of
//! [`stencil`](self::SymMat) with a banded direct solver.

mod banded;
mod closed_form;
pub(crate) mod grid;
mod solver;
pub(crate) mod stencil;

pub use closed_form::{closed_form_1d, closed_form_1d_correction, closed_form_1d_hessian};
pub use grid::GridSpec;
pub use solver::{solve_dirichlet, solve_real_ma, solve_real_ma_with, SolveOptions};
pub use stencil::SymMat;

pub(crate) use solver::log_det_field;

use thiserror::Error;

use crate::exec::Exec;
use crate::toric::SimplexDomain;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaError {
    #[error("point {0:?} lies outside the open domain")]
    DomainViolation(Vec<f64>),
    #[error("dim must be 1..3, got {0}")]
    UnsupportedDimension(usize),
    #[error("resolution {resolution} too coarse (minimum {minimum})")]
    ResolutionTooCoarse { resolution: usize, minimum: usize },
    #[error("kappa must be positive and finite, got {0}")]
    NonPositiveKappa(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("Newton iteration diverged; residual trace {trace:?}")]
    NewtonDiverged { trace: Vec<f64> },
    #[error("Hessian lost positive definiteness at node {node} ({coords:?})")]
    LossOfConvexity { node: usize, coords: Vec<f64> },
    #[error(
        "exhaustion did not saturate by M = {last_m}: interior change {last_change:e} above {target:e}"
    )]
    ExhaustionNotSaturated {
        last_m: f64,
        last_change: f64,
        target: f64,
    },
    #[error("operation needs a solution of positive dimension")]
    EmptySolution,
    #[error("sample count {got} does not match the {expected} grid nodes")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMode {
    Barrier,
    Exhaustion,
}

impl std::str::FromStr for SolveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "barrier" => Ok(SolveMode::Barrier),
            "exhaustion" => Ok(SolveMode::Exhaustion),
            _ => Err(format!(
                "unknown mode {s:?} (expected barrier or exhaustion)"
            )),
        }
    }
}

/// How values outside the node set enter the stencil.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Closure {
    /// The closed-grid array holds the bounded correction `ψ = φ_ref - B`.
    Barrier,
    /// The closed-grid array holds `φ_ref` itself.
    Plain,
}

/// A grid-sampled convex solution together with its residual statistics.
///
/// Values and Hessians are in the physical coordinates of the domain.
#[derive(Debug, Clone)]
pub struct MASolution {
    grid: GridSpec,
    kappa: f64,
    values: Vec<f64>,
    hessians: Vec<SymMat>,
    residual_sup: f64,
    newton_iters: usize,
    pub(crate) closure: Closure,
    /// closed standard-grid samples, see [`Closure`]
    pub(crate) closed: Vec<f64>,
}

impl MASolution {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `φ` at each node.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored central-difference Hessians, one per node.
    pub fn hessians(&self) -> &[SymMat] {
        &self.hessians
    }

    pub fn residual_sup(&self) -> f64 {
        self.residual_sup
    }

    pub fn newton_iters(&self) -> usize {
        self.newton_iters
    }

    /// Solve mode whose discretisation backs this solution.
    pub fn mode(&self) -> SolveMode {
        match self.closure {
            Closure::Barrier => SolveMode::Barrier,
            Closure::Plain => SolveMode::Exhaustion,
        }
    }

    /// Builds a solution from a prescribed bounded correction `ψ`, a function
    /// of physical coordinates that must extend continuously to the closed
    /// domain. The potential is `φ = B∘A + ψ` with `A` the affine map onto
    /// the standard simplex, discretised exactly as in barrier mode.
    pub fn from_barrier_correction(
        grid: GridSpec,
        kappa: f64,
        psi: impl Fn(&[f64]) -> f64,
    ) -> Result<Self, MaError> {
        solver::assemble_sampled(grid, kappa, Closure::Barrier, |x| psi(x))
    }

    /// Builds a solution from samples of `φ` on the closed grid, discretised
    /// by plain central differences as in exhaustion mode. `phi` is also
    /// evaluated on the boundary points of the grid.
    pub fn from_potential(
        grid: GridSpec,
        kappa: f64,
        phi: impl Fn(&[f64]) -> f64,
    ) -> Result<Self, MaError> {
        solver::assemble_sampled(grid, kappa, Closure::Plain, |x| phi(x))
    }

    /// Node nearest to the physical point `x`.
    pub fn nearest_node(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let n = self.grid.resolution() as f64;
        let idx: Vec<usize> = self
            .grid
            .to_ref(x)
            .iter()
            .map(|&y| {
                let k = (y * n).round();
                if k < 0.0 {
                    0
                } else {
                    k as usize
                }
            })
            .collect();
        self.grid.node_at(&idx)
    }

    /// Piecewise-linear interpolation of the Hessian field over the Kuhn
    /// triangulation of the grid. Fails if any corner of the containing
    /// simplex is not a node.
    pub fn hessian_at(&self, x: &[f64]) -> Option<SymMat> {
        let s = self.dim();
        if x.len() != s || s == 0 {
            return None;
        }
        let n = self.grid.resolution() as f64;
        let y = self.grid.to_ref(x);
        let mut base = Vec::with_capacity(s);
        let mut frac = Vec::with_capacity(s);
        for &v in &y {
            let t = v * n;
            if !(t >= 0.0) {
                return None;
            }
            let f = t.floor();
            base.push(f as usize);
            frac.push(t - f);
        }
        let mut order: Vec<usize> = (0..s).collect();
        order.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(a.cmp(&b)));
        let mut corner = base.clone();
        let mut acc = SymMat::zeros(s);
        let mut prev = 1.0;
        for step in 0..=s {
            let next = if step < s { frac[order[step]] } else { 0.0 };
            let w = prev - next;
            if w > 0.0 {
                let node = self.grid.node_at(&corner)?;
                acc = acc.add(&self.hessians[node].scaled(w));
            }
            if step < s {
                corner[order[step]] += 1;
            }
            prev = next;
        }
        Some(acc)
    }
}

/// Per-node residual field with summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSummary {
    pub field: Vec<f64>,
    pub sup: f64,
    pub mean: f64,
    pub argmax: usize,
    pub argmax_coords: Vec<f64>,
}

/// Recomputes `|det D²φ - κe^{2φ}| / (κe^{2φ})` at every node.
pub fn ma_residual(sol: &MASolution) -> ResidualSummary {
    ma_residual_with(sol, Exec::default())
}

pub fn ma_residual_with(sol: &MASolution, exec: Exec) -> ResidualSummary {
    let (_, field) = solver::evaluate(sol, exec);
    let mut sup = 0.0;
    let mut argmax = 0;
    for (i, &r) in field.iter().enumerate() {
        if r > sup {
            sup = r;
            argmax = i;
        }
    }
    let mean = if field.is_empty() {
        0.0
    } else {
        field.iter().sum::<f64>() / field.len() as f64
    };
    let argmax_coords = if field.is_empty() {
        Vec::new()
    } else {
        sol.grid.coords(argmax)
    };
    ResidualSummary {
        field,
        sup,
        mean,
        argmax,
        argmax_coords,
    }
}

/// Recomputes the central-difference Hessian at every node.
pub fn hessian_field(sol: &MASolution) -> Result<Vec<SymMat>, MaError> {
    hessian_field_with(sol, Exec::default())
}

pub fn hessian_field_with(sol: &MASolution, exec: Exec) -> Result<Vec<SymMat>, MaError> {
    let (h, _) = solver::evaluate(sol, exec);
    if let Some(node) = h.iter().position(|m| !m.is_spd()) {
        return Err(MaError::LossOfConvexity {
            node,
            coords: sol.grid.coords(node),
        });
    }
    Ok(h)
}

/// Standard simplex of the given dimension, validated for the solver.
pub fn standard_domain(dim: usize) -> Result<SimplexDomain, MaError> {
    if !(1..=3).contains(&dim) {
        return Err(MaError::UnsupportedDimension(dim));
    }
    Ok(SimplexDomain::standard(dim))
}
