//! Special Lagrangian conditions in the flat limit.
//!
//! The limit model at a base point has constant coefficients:
//! `ω_∞ = Σ H_ij dx_i ∧ dθ_j` and `Ω_∞ = ζ₀ dw_1 ∧ … ∧ dw_n` with
//! `w_j = x_j + iθ_j`. An affine torus `θ ↦ (x₀ + Tθ, θ)` has tangent frame
//! `V_a = Σ_i T_ia ∂x_i + ∂θ_a`, on which
//!
//! ```text
//! ω_∞(V_a, V_b) = (TᵀH)_ab - (TᵀH)_ba,    Ω_∞(V_1, …, V_n) = ζ₀ det(T + iI).
//! ```

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use super::metric::SemiflatMetric;
use super::SemiflatError;

/// The phase `ϑ ∈ [0, π)` with `Im(e^{iϑ} ζ₀ iⁿ) = 0`, that is
/// `ϑ ≡ -arg ζ₀ - nπ/2 (mod π)`.
pub fn special_phase(zeta0: Complex64, n: usize) -> Result<f64, SemiflatError> {
    if !(zeta0.norm() > 0.0) || !zeta0.re.is_finite() || !zeta0.im.is_finite() {
        return Err(SemiflatError::ZeroForm);
    }
    let raw = -zeta0.arg() - (n % 4) as f64 * PI / 2.0;
    let mut t = raw.rem_euclid(PI);
    if t >= PI {
        t -= PI;
    }
    Ok(t)
}

/// Frozen data of the flat limit at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatLimitData {
    pub dim: usize,
    pub hessian_at_p: DMatrix<f64>,
    pub zeta0: Complex64,
    pub phase: f64,
}

impl FlatLimitData {
    /// Validates the data and fixes the phase by [`special_phase`].
    pub fn new(hessian_at_p: DMatrix<f64>, zeta0: Complex64) -> Result<Self, SemiflatError> {
        let dim = hessian_at_p.nrows();
        let phase = special_phase(zeta0, dim)?;
        Self::with_phase(hessian_at_p, zeta0, phase)
    }

    /// Same as [`FlatLimitData::new`] but with a caller-chosen phase.
    pub fn with_phase(
        hessian_at_p: DMatrix<f64>,
        zeta0: Complex64,
        phase: f64,
    ) -> Result<Self, SemiflatError> {
        let dim = hessian_at_p.nrows();
        if hessian_at_p.ncols() != dim {
            return Err(SemiflatError::DimensionMismatch {
                expected: dim,
                got: hessian_at_p.ncols(),
            });
        }
        if (&hessian_at_p - hessian_at_p.transpose()).amax() > 1e-12 * hessian_at_p.amax()
            || Cholesky::new(hessian_at_p.clone()).is_none()
        {
            return Err(SemiflatError::NotPositiveDefinite);
        }
        if !(zeta0.norm() > 0.0) {
            return Err(SemiflatError::ZeroForm);
        }
        Ok(FlatLimitData {
            dim,
            hessian_at_p,
            zeta0,
            phase,
        })
    }

    /// Freezes the semi-flat metric at the base point `x`.
    pub fn from_metric(
        m: &SemiflatMetric,
        x: &[f64],
        zeta0: Complex64,
    ) -> Result<Self, SemiflatError> {
        Self::new(m.hessian(x)?.to_dmatrix(), zeta0)
    }
}

/// The affine torus `θ ↦ (x₀ + Tθ, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineTorus {
    pub base_point: Vec<f64>,
    pub tilt: DMatrix<f64>,
}

impl AffineTorus {
    /// Pure θ-directions over `x₀`.
    pub fn coordinate(base_point: Vec<f64>) -> Self {
        let n = base_point.len();
        AffineTorus {
            base_point,
            tilt: DMatrix::zeros(n, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialDefect {
    /// Largest entry of `ω_∞` on the torus frame.
    pub lagrangian: f64,
    /// `|Im(e^{iϑ} Ω_∞)|` on the torus frame.
    pub imaginary: f64,
}

pub fn special_defect(
    f: &FlatLimitData,
    torus: &AffineTorus,
) -> Result<SpecialDefect, SemiflatError> {
    let n = f.dim;
    let t = &torus.tilt;
    if t.nrows() != n || t.ncols() != n || torus.base_point.len() != n {
        return Err(SemiflatError::DimensionMismatch {
            expected: n,
            got: if t.nrows() != n {
                t.nrows()
            } else if t.ncols() != n {
                t.ncols()
            } else {
                torus.base_point.len()
            },
        });
    }
    let th = t.transpose() * &f.hessian_at_p;
    let lagrangian = (&th - th.transpose()).amax();
    let frame = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(t[(i, j)], if i == j { 1.0 } else { 0.0 })
    });
    let omega = f.zeta0 * frame.determinant();
    let imaginary = (Complex64::from_polar(1.0, f.phase) * omega).im.abs();
    Ok(SpecialDefect {
        lagrangian,
        imaginary,
    })
}
