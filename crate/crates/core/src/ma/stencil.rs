//! Small symmetric matrices and the simplex-equivariant second-difference
//! stencil.
//!
//! Second derivatives are taken along the `s(s+1)/2` edge directions of the
//! simplex, `e_k` and `e_k - e_l`. The Hessian is recovered from
//!
//! ```text
//! H_kk = D_{e_k},   H_kl = (D_{e_k} + D_{e_l} - D_{e_k - e_l}) / 2,
//! ```
//!
//! where `D_e f = (f(x+he) + f(x-he) - 2f(x)) / h²`. The direction set is
//! permuted by the symmetries of the simplex, and every neighbour of an
//! interior node lies in the closed simplex.

use nalgebra::DMatrix;

use super::grid::GridSpec;

/// Symmetric `s x s` matrix with `s <= 3`, stored densely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat {
    s: usize,
    a: [f64; 9],
}

impl SymMat {
    pub fn zeros(s: usize) -> Self {
        assert!(s <= 3, "SymMat supports dimension at most 3");
        SymMat { s, a: [0.0; 9] }
    }

    pub fn identity(s: usize) -> Self {
        let mut m = SymMat::zeros(s);
        for i in 0..s {
            m.a[i * 3 + i] = 1.0;
        }
        m
    }

    /// Builds from a row-major slice of length `s*s`, symmetrising.
    pub fn from_row_major(s: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), s * s);
        let mut m = SymMat::zeros(s);
        for i in 0..s {
            for j in 0..s {
                m.a[i * 3 + j] = 0.5 * (v[i * s + j] + v[j * s + i]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * 3 + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * 3 + j] = v;
        self.a[j * 3 + i] = v;
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut m = *self;
        m.a.iter_mut().for_each(|x| *x *= c);
        m
    }

    pub fn add(&self, o: &SymMat) -> Self {
        let mut m = *self;
        m.a.iter_mut().zip(o.a.iter()).for_each(|(x, y)| *x += y);
        m
    }

    pub fn det(&self) -> f64 {
        let g = |i, j| self.get(i, j);
        match self.s {
            0 => 1.0,
            1 => g(0, 0),
            2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
            _ => {
                g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                    - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                    + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
            }
        }
    }

    /// Cofactor matrix (equal to the adjugate for symmetric input).
    pub fn cofactor(&self) -> SymMat {
        let g = |i, j| self.get(i, j);
        let mut c = SymMat::zeros(self.s);
        match self.s {
            0 => {}
            1 => c.a[0] = 1.0,
            2 => {
                c.set(0, 0, g(1, 1));
                c.set(1, 1, g(0, 0));
                c.set(0, 1, -g(0, 1));
            }
            _ => {
                for i in 0..3 {
                    for j in i..3 {
                        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                        c.set(i, j, g(r0, c0) * g(r1, c1) - g(r0, c1) * g(r1, c0));
                    }
                }
            }
        }
        c
    }

    /// Positive definiteness by leading principal minors.
    pub fn is_spd(&self) -> bool {
        let g = |i, j| self.get(i, j);
        if !self.a.iter().all(|x| x.is_finite()) {
            return false;
        }
        match self.s {
            0 => true,
            1 => g(0, 0) > 0.0,
            2 => g(0, 0) > 0.0 && self.det() > 0.0,
            _ => g(0, 0) > 0.0 && g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1) > 0.0 && self.det() > 0.0,
        }
    }

    /// `vᵀ M v`.
    pub fn quad(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.s {
            for j in 0..self.s {
                acc += v[i] * self.get(i, j) * v[j];
            }
        }
        acc
    }

    /// Largest `|M_ij - M_ji|`; zero by construction, kept for checks.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.s {
            for j in 0..self.s {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.a[..].iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.s, self.s, |i, j| self.get(i, j))
    }

    /// `M[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> SymMat {
        let mut m = SymMat::zeros(self.s);
        for i in 0..self.s {
            for j in 0..self.s {
                m.a[i * 3 + j] = self.get(perm[i], perm[j]);
            }
        }
        m
    }
}

/// One stencil direction: its dense offset and its integer vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Direction {
    pub offset: isize,
    /// `(k, None)` for `e_k`, `(k, Some(l))` for `e_k - e_l`
    pub k: usize,
    pub l: Option<usize>,
}

pub(crate) fn directions(g: &GridSpec) -> Vec<Direction> {
    let s = g.dim();
    let mut out = Vec::with_capacity(s * (s + 1) / 2);
    for k in 0..s {
        out.push(Direction {
            offset: g.stride(k) as isize,
            k,
            l: None,
        });
    }
    for k in 0..s {
        for l in (k + 1)..s {
            out.push(Direction {
                offset: g.stride(k) as isize - g.stride(l) as isize,
                k,
                l: Some(l),
            });
        }
    }
    out
}

/// Second differences `D_e f` at dense position `c` with spacing
/// `step * h_ref`, one per direction.
#[inline]
pub(crate) fn second_differences(
    f: &[f64],
    c: usize,
    dirs: &[Direction],
    step: usize,
    h_ref: f64,
    out: &mut [f64; 6],
) {
    let inv = 1.0 / (step as f64 * h_ref).powi(2);
    let fc = f[c];
    for (o, d) in out.iter_mut().zip(dirs) {
        let off = d.offset * step as isize;
        let p = f[(c as isize + off) as usize];
        let m = f[(c as isize - off) as usize];
        *o = (p + m - 2.0 * fc) * inv;
    }
}

/// Assembles the Hessian from directional second differences.
#[inline]
pub(crate) fn hessian_from_differences(s: usize, dirs: &[Direction], dd: &[f64; 6]) -> SymMat {
    let mut h = SymMat::zeros(s);
    for (d, &v) in dirs.iter().zip(dd) {
        if d.l.is_none() {
            h.set(d.k, d.k, v);
        }
    }
    for (d, &v) in dirs.iter().zip(dd) {
        if let Some(l) = d.l {
            let k = d.k;
            h.set(k, l, 0.5 * (h.get(k, k) + h.get(l, l) - v));
        }
    }
    h
}

/// Weights `w_e` with `Σ_e w_e D_e = A : D²` for a symmetric `A`, i.e. the
/// coefficient of each directional difference in the linearisation.
#[inline]
pub(crate) fn direction_weights(a: &SymMat, dirs: &[Direction], out: &mut [f64; 6]) {
    let s = a.dim();
    for (o, d) in out.iter_mut().zip(dirs) {
        *o = match d.l {
            None => {
                let k = d.k;
                a.get(k, k) + (0..s).filter(|&l| l != k).map(|l| a.get(k, l)).sum::<f64>()
            }
            Some(l) => -a.get(d.k, l),
        };
    }
}

/// Analytic Hessian of the barrier `B(y) = -Σ_{j=0}^{s} log y_j` on the
/// standard simplex, `y_0 = 1 - Σ y_j`.
pub(crate) fn barrier_hessian(y: &[f64]) -> SymMat {
    let s = y.len();
    let y0 = 1.0 - y.iter().sum::<f64>();
    let c = 1.0 / (y0 * y0);
    let mut h = SymMat::zeros(s);
    for i in 0..s {
        for j in i..s {
            let v = if i == j { c + 1.0 / (y[i] * y[i]) } else { c };
            h.set(i, j, v);
        }
    }
    h
}

pub(crate) fn barrier(y: &[f64]) -> f64 {
    let y0 = 1.0 - y.iter().sum::<f64>();
    -y0.ln() - y.iter().map(|v| v.ln()).sum::<f64>()
}

/// `Π_{j=0}^{s} y_j²`, so that `e^{2B} · prod = 1`.
pub(crate) fn barrier_weight(y: &[f64]) -> f64 {
    let y0 = 1.0 - y.iter().sum::<f64>();
    y.iter().fold(y0 * y0, |p, v| p * v * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::SimplexDomain;

    #[test]
    fn cofactor_identity() {
        let m = SymMat::from_row_major(3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let c = m.cofactor();
        let det = m.det();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m.get(i, k) * c.get(k, j)).sum();
                let e = if i == j { det } else { 0.0 };
                assert!((v - e).abs() < 1e-12);
            }
        }
        assert!(m.is_spd());
        assert!(!m.scaled(-1.0).is_spd());
    }

    #[test]
    fn stencil_exact_on_quadratics() {
        // f = yᵀ A y / 2 has Hessian A exactly
        let g = GridSpec::new(SimplexDomain::standard(3), 10).unwrap();
        let a = SymMat::from_row_major(3, &[2.0, 0.3, -0.4, 0.3, 1.5, 0.7, -0.4, 0.7, 3.0]);
        let mut f = vec![0.0; g.dense_len()];
        for d in 0..g.dense_len() {
            let idx = g.dense_index(d);
            let y: Vec<f64> = idx.iter().map(|&k| k as f64 / 10.0).collect();
            f[d] = 0.5 * a.quad(&y);
        }
        let dirs = directions(&g);
        let mut dd = [0.0; 6];
        for i in 0..g.len() {
            second_differences(&f, g.dense(i), &dirs, 1, 0.1, &mut dd);
            let h = hessian_from_differences(3, &dirs, &dd);
            for p in 0..3 {
                for q in 0..3 {
                    assert!((h.get(p, q) - a.get(p, q)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn weights_reproduce_contraction() {
        let g = GridSpec::new(SimplexDomain::standard(3), 10).unwrap();
        let dirs = directions(&g);
        let a = SymMat::from_row_major(3, &[1.0, 0.2, 0.3, 0.2, 2.0, -0.1, 0.3, -0.1, 0.5]);
        let dd = [0.7, -1.1, 2.3, 0.4, 1.9, -0.6];
        let h = hessian_from_differences(3, &dirs, &dd);
        let mut w = [0.0; 6];
        direction_weights(&a, &dirs, &mut w);
        let lhs: f64 = w.iter().zip(&dd).map(|(a, b)| a * b).sum();
        let mut rhs = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                rhs += a.get(i, j) * h.get(i, j);
            }
        }
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn barrier_determinant_identity() {
        // det D²B = (Σ_{j=0}^{s} y_j²) e^{2B}
        let y = [0.2, 0.3, 0.1];
        let lhs = barrier_hessian(&y).det();
        let y0: f64 = 1.0 - y.iter().sum::<f64>();
        let sq = y0 * y0 + y.iter().map(|v| v * v).sum::<f64>();
        let rhs = sq / barrier_weight(&y);
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
        assert!(((-2.0 * barrier(&y)).exp() - barrier_weight(&y)).abs() < 1e-14);
    }
}
