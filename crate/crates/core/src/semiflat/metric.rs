use nalgebra::DMatrix;

use crate::exec::Exec;
use crate::ma::stencil::{directions, hessian_from_differences, second_differences};
use crate::ma::{hessian_field, log_det_field, MASolution, SymMat};

use super::SemiflatError;

/// Factor between the raw Einstein quantity and `Ric(g) + g`.
///
/// With `ω = Σ φ_ij dx_i ∧ dθ_j` and `w_j = x_j + iθ_j` one has
/// `∂²/∂w∂w̄ = ¼ Δ_x` on θ-invariant functions, so the Ricci form
/// `-i∂∂̄ log det(φ_ij)` has coefficients `-½ ∂²_ij log det H` against
/// `dx_i ∧ dθ_j`, while `ω` has coefficients `φ_ij = ½ ∂²_ij (2φ)`. Hence
/// `(Ric + g)_ij = -½ ∂²_ij (log det H - 2φ)`; the raw quantity reported by
/// [`ricci_residual`] is the bracketed second derivative.
pub const RICCI_NORMALIZATION: f64 = 0.5;

/// Outer stencil spacing, in grid steps, for the second derivatives of
/// `log det H - 2φ`.
const OUTER_STEP: usize = 4;

/// Semi-flat metric over a converged Monge-Ampère solution.
#[derive(Debug, Clone)]
pub struct SemiflatMetric {
    base: MASolution,
    neg_log_t: f64,
}

/// Builds the semi-flat metric for `|t| = t_abs`.
pub fn semiflat_metric(sol: &MASolution, t_abs: f64) -> Result<SemiflatMetric, SemiflatError> {
    if !(t_abs > 0.0 && t_abs < 1.0) {
        return Err(SemiflatError::DegenerateParameter(t_abs));
    }
    SemiflatMetric::from_neg_log_t(sol, -t_abs.ln())
}

impl SemiflatMetric {
    /// Builds the metric from `L = -log t`, which keeps `t ↦ t²` exact
    /// (`L ↦ 2L`).
    pub fn from_neg_log_t(sol: &MASolution, neg_log_t: f64) -> Result<Self, SemiflatError> {
        if !(neg_log_t > 0.0 && neg_log_t.is_finite()) {
            return Err(SemiflatError::DegenerateParameter((-neg_log_t).exp()));
        }
        if sol.dim() == 0 {
            return Err(crate::ma::MaError::EmptySolution.into());
        }
        hessian_field(sol)?;
        Ok(SemiflatMetric {
            base: sol.clone(),
            neg_log_t,
        })
    }

    pub fn base(&self) -> &MASolution {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn t_abs(&self) -> f64 {
        (-self.neg_log_t).exp()
    }

    pub fn neg_log_t(&self) -> f64 {
        self.neg_log_t
    }

    /// Period `2π / (-log t)` of each angle coordinate.
    pub fn torus_period(&self) -> f64 {
        std::f64::consts::TAU / self.neg_log_t
    }

    /// Base Hessian at `x`, interpolated between nodes.
    pub fn hessian(&self, x: &[f64]) -> Result<SymMat, SemiflatError> {
        self.base.hessian_at(x).ok_or_else(|| self.too_close(x, 1))
    }

    /// The `2s x 2s` metric `diag(H(x), H(x))` in coordinates `(x, θ)`.
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>, SemiflatError> {
        let h = self.hessian(x)?;
        let s = self.dim();
        Ok(DMatrix::from_fn(2 * s, 2 * s, |i, j| {
            if (i < s) == (j < s) {
                h.get(i % s, j % s)
            } else {
                0.0
            }
        }))
    }

    pub(crate) fn too_close(&self, x: &[f64], steps: usize) -> SemiflatError {
        let g = self.base.grid();
        SemiflatError::BoundaryTooClose {
            point: x.to_vec(),
            slack: if x.len() == g.dim() {
                g.domain().slack(x)
            } else {
                f64::NAN
            },
            required: steps as f64 * g.h(),
        }
    }
}

/// Nodes with slack at least `OUTER_STEP + 1` grid steps, i.e. the points
/// where [`ricci_residual`] is defined.
pub fn einstein_samples(sol: &MASolution) -> Vec<Vec<f64>> {
    let g = sol.grid();
    let need = (OUTER_STEP + 1) as f64 * g.h() * (1.0 - 1e-9);
    (0..g.len())
        .filter(|&i| g.slack(i) >= need)
        .map(|i| g.coords(i))
        .collect()
}

/// Largest entry of `|∂²_ij (log det H - 2φ)|` over the samples.
///
/// Each sample is snapped to its nearest node, which must have slack of at
/// least five grid steps. The outer second differences use a spacing of
/// four steps so that round-off in `log det H` is not amplified by `1/h²`.
pub fn ricci_residual(m: &SemiflatMetric, points: &[Vec<f64>]) -> Result<f64, SemiflatError> {
    ricci_residual_with(m, points, Exec::default())
}

pub fn ricci_residual_with(
    m: &SemiflatMetric,
    points: &[Vec<f64>],
    exec: Exec,
) -> Result<f64, SemiflatError> {
    let sol = &m.base;
    let g = sol.grid();
    let s = g.dim();
    let need = (OUTER_STEP + 1) as f64 * g.h() * (1.0 - 1e-9);
    let mut centers = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != s {
            return Err(SemiflatError::DimensionMismatch {
                expected: s,
                got: p.len(),
            });
        }
        match sol.nearest_node(p) {
            Some(i) if g.slack(i) >= need => centers.push(g.dense(i)),
            _ => return Err(m.too_close(p, OUTER_STEP + 1)),
        }
    }
    let field = log_det_field(sol, exec);
    let dirs = directions(g);
    let h_ref = 1.0 / g.resolution() as f64;
    let inv_l2 = 1.0 / (g.scale() * g.scale());
    let sups = exec.map(&centers, |&c| {
        let mut dd = [0.0; 6];
        second_differences(&field, c, &dirs, OUTER_STEP, h_ref, &mut dd);
        hessian_from_differences(s, &dirs, &dd)
            .scaled(inv_l2)
            .max_abs()
    });
    Ok(sups.into_iter().fold(0.0, f64::max))
}
