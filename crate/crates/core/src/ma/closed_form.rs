use std::f64::consts::PI;

use super::MaError;

/// The one-dimensional solution `φ(x) = -log((√κ/π) sin πx)` of
/// `φ'' = κ e^{2φ}` on `(0,1)` with `φ → +∞` at both ends.
///
/// Substituting: `φ' = -π cot πx`, `φ'' = π² csc² πx`, and
/// `κ e^{2φ} = κ π² / (κ sin² πx) = π² csc² πx`.
pub fn closed_form_1d(kappa: f64, x: f64) -> Result<f64, MaError> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(MaError::NonPositiveKappa(kappa));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(MaError::DomainViolation(vec![x]));
    }
    Ok(-((kappa.sqrt() / PI) * (PI * x).sin()).ln())
}

/// `φ''` of [`closed_form_1d`]: `π² csc² πx`, independent of `κ`.
pub fn closed_form_1d_hessian(x: f64) -> f64 {
    let s = (PI * x).sin();
    PI * PI / (s * s)
}

/// The bounded part `ψ = φ + log x + log(1-x)` of the 1D solution,
/// `log(π x (1-x) / sin πx) - ½ log κ`, evaluated stably up to the closed
/// interval (its limit at both ends is `-½ log κ`).
pub fn closed_form_1d_correction(kappa: f64, x: f64) -> f64 {
    let base = if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        let u = x.min(1.0 - x);
        // π u (1-u) / sin(π u) with sin(π(1-u)) = sin(π u)
        let pu = PI * u;
        if pu < 1e-4 {
            // sinc expansion: pu/sin(pu) = 1 + pu²/6 + 7pu⁴/360
            ((1.0 - u) * (1.0 + pu * pu / 6.0 + 7.0 * pu.powi(4) / 360.0)).ln()
        } else {
            (pu * (1.0 - u) / pu.sin()).ln()
        }
    };
    base - 0.5 * kappa.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((closed_form_1d(1.0, 0.5).unwrap() - PI.ln()).abs() < 1e-15);
        assert!((closed_form_1d(1.0, 0.5).unwrap() - 1.1447299).abs() < 1e-7);
        assert!((closed_form_1d(1.0, 0.1).unwrap() - 2.3191).abs() < 1e-4);
        let shifted = closed_form_1d(4.0, 0.5).unwrap();
        assert!((shifted - (PI.ln() - 0.5 * 4f64.ln())).abs() < 1e-15);
        assert!((shifted - 0.45160).abs() < 5e-5);
        assert!(closed_form_1d(1.0, 0.0).is_err());
        assert!(closed_form_1d(1.0, 1.2).is_err());
        assert!(closed_form_1d(0.0, 0.5).is_err());
    }

    #[test]
    fn satisfies_the_ode() {
        // fourth-order difference of the closed form against κ e^{2φ}
        for &k in &[0.5, 1.0, 3.0] {
            for i in 1..20 {
                let x = i as f64 / 20.0;
                let h = 1e-3;
                let f = |t: f64| closed_form_1d(k, t).unwrap();
                let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
                    - f(x - 2.0 * h))
                    / (12.0 * h * h);
                let rhs = k * (2.0 * f(x)).exp();
                assert!((d2 / rhs - 1.0).abs() < 1e-6, "k={k} x={x}");
                assert!((closed_form_1d_hessian(x) / rhs - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn correction_matches_split() {
        for i in 1..50 {
            let x = i as f64 / 50.0;
            let phi = closed_form_1d(2.0, x).unwrap();
            let b = -x.ln() - (1.0 - x).ln();
            assert!((closed_form_1d_correction(2.0, x) - (phi - b)).abs() < 1e-13);
        }
        assert!((closed_form_1d_correction(4.0, 0.0) + 0.5 * 4f64.ln()).abs() < 1e-15);
        let near = closed_form_1d_correction(1.0, 1e-6);
        assert!(near.abs() < 2e-6);
    }
}
