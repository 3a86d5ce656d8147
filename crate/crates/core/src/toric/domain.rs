use super::ToricError;

/// The open simplex `{x ∈ ℝ^s : x_j > δ, Σ x_j < 1 - δ}`.
///
/// `δ = 0` gives the standard open simplex. Coordinates are `x_1..x_s`, the
/// slot `x_0 = 1 - Σ x_j` being eliminated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexDomain {
    dim: usize,
    margin: f64,
}

impl SimplexDomain {
    pub fn new(dim: usize, margin: f64) -> Result<Self, ToricError> {
        let bound = 1.0 / (dim as f64 + 1.0);
        if !(margin >= 0.0) || margin >= bound {
            return Err(ToricError::EmptyDomain { dim, margin, bound });
        }
        Ok(SimplexDomain { dim, margin })
    }

    pub fn standard(dim: usize) -> Self {
        SimplexDomain { dim, margin: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// The `s+1` barycentric slots `(x_0, x_1, .., x_s)`.
    pub fn barycentric(x: &[f64]) -> Vec<f64> {
        let mut b = Vec::with_capacity(x.len() + 1);
        b.push(1.0 - x.iter().sum::<f64>());
        b.extend_from_slice(x);
        b
    }

    /// Smallest slack among the defining inequalities, `min_j x_j - δ` over
    /// all `s+1` barycentric slots. Positive exactly on the open domain.
    pub fn slack(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        Self::barycentric(x)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            - self.margin
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.slack(x) > 0.0
    }

    pub fn barycenter(&self) -> Vec<f64> {
        vec![1.0 / (self.dim as f64 + 1.0); self.dim]
    }
}

/// `x_j = log|z_j| / log t`.
pub fn log_map(moduli: &[f64], t_abs: f64) -> Result<Vec<f64>, ToricError> {
    if !(t_abs > 0.0 && t_abs < 1.0) {
        return Err(ToricError::DegenerateParameter(t_abs));
    }
    let lt = t_abs.ln();
    moduli
        .iter()
        .enumerate()
        .map(|(index, &m)| {
            if m > 0.0 && m.is_finite() {
                Ok(m.ln() / lt)
            } else {
                Err(ToricError::NonPositiveModulus { index, value: m })
            }
        })
        .collect()
}

/// The base `B_t` of the torus fibration: the standard `s`-simplex shrunk by
/// `δ = log ε / log t`.
pub fn fibration_base(s: usize, t_abs: f64, eps: f64) -> Result<SimplexDomain, ToricError> {
    if !(t_abs > 0.0 && t_abs < 1.0) {
        return Err(ToricError::DegenerateParameter(t_abs));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ToricError::BadEpsilon(eps));
    }
    // eps = 1 gives -0.0 otherwise
    let delta = (eps.ln() / t_abs.ln()).abs();
    SimplexDomain::new(s, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_map_examples() {
        let t: f64 = 0.37;
        assert!((log_map(&[t], t).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((log_map(&[0.001], 0.01).unwrap()[0] - 1.5).abs() < 1e-14);
        let z0 = 0.2;
        let x = log_map(&[z0, t / z0], t).unwrap();
        assert!((x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!(log_map(&[1.0], 1.0).is_err());
        assert!(log_map(&[0.0], 0.5).is_err());
        assert!(log_map(&[-1.0], 0.5).is_err());
    }

    #[test]
    fn fibration_base_examples() {
        assert_eq!(fibration_base(2, 0.3, 1.0).unwrap().margin(), 0.0);
        let b = fibration_base(2, (-10.0f64).exp(), (-1.0f64).exp()).unwrap();
        assert!((b.margin() - 0.1).abs() < 1e-15);
        assert!(matches!(
            fibration_base(2, (-2.0f64).exp(), (-1.0f64).exp()),
            Err(ToricError::EmptyDomain { .. })
        ));
        let mut last = f64::INFINITY;
        for k in 1..20 {
            let d = fibration_base(3, (-(k as f64) * 5.0).exp(), 0.5)
                .unwrap()
                .margin();
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn slack_and_containment() {
        let d = SimplexDomain::new(2, 0.1).unwrap();
        assert!(d.contains(&[0.3, 0.3]));
        assert!(!d.contains(&[0.05, 0.3]));
        assert!(!d.contains(&[0.5, 0.45]));
        assert!((d.slack(&[0.2, 0.3]) - 0.1).abs() < 1e-15);
        assert!(SimplexDomain::new(1, 0.5).is_err());
        assert!(SimplexDomain::new(1, -0.1).is_err());
    }
}
