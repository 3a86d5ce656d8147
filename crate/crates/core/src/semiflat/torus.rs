//! Flat tori `ℝ^s / (p ℤ^s)` with a constant metric `H`.
//!
//! Writing `H = L Lᵀ`, the map `v ↦ Lᵀ v` is an isometry onto Euclidean
//! space carrying `ℤ^s` to the lattice spanned by the rows of `L`. The
//! diameter of the torus is the covering radius of that lattice, the largest
//! distance from a point to its nearest lattice point, which is attained at a
//! vertex of the Voronoi cell.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::ma::SymMat;

use super::metric::SemiflatMetric;
use super::SemiflatError;

/// Euclidean model of `(ℤ^s, H)` with an LLL-reduced basis.
#[derive(Debug, Clone)]
pub(crate) struct FlatLattice {
    s: usize,
    /// `Lᵀ`, mapping coordinates to Euclidean space
    lt: DMatrix<f64>,
    /// reduced basis as columns
    basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
}

impl FlatLattice {
    pub fn new(h: &SymMat) -> Result<Self, SemiflatError> {
        let s = h.dim();
        let chol = Cholesky::new(h.to_dmatrix()).ok_or(SemiflatError::NotPositiveDefinite)?;
        let lt = chol.l().transpose();
        let basis = lll(lt.clone());
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or(SemiflatError::NotPositiveDefinite)?;
        Ok(FlatLattice {
            s,
            lt,
            basis,
            basis_inv,
        })
    }

    fn vec(&self, k: &[i64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.s);
        for (j, &c) in k.iter().enumerate() {
            if c != 0 {
                v += self.basis.column(j) * c as f64;
            }
        }
        v
    }

    /// Voronoi-relevant vectors: for each nonzero class of `Λ / 2Λ`, the
    /// shortest vectors of the class when they are unique up to sign.
    fn relevant(&self) -> Vec<DVector<f64>> {
        let s = self.s;
        let mut out = Vec::new();
        for parity in 1..(1u32 << s) {
            let choices: Vec<&[i64]> = (0..s)
                .map(|j| {
                    if parity >> j & 1 == 1 {
                        &[-3i64, -1, 1, 3][..]
                    } else {
                        &[-2i64, 0, 2][..]
                    }
                })
                .collect();
            let mut best = f64::INFINITY;
            let mut best_vecs: Vec<DVector<f64>> = Vec::new();
            for_each_combo(&choices, &mut |k| {
                let v = self.vec(k);
                let n = v.norm_squared();
                if n < best * (1.0 - 1e-12) {
                    best = n;
                    best_vecs = vec![v];
                } else if n <= best * (1.0 + 1e-12) {
                    best_vecs.push(v);
                }
            });
            if best_vecs.len() == 2 {
                out.extend(best_vecs);
            }
        }
        out
    }

    pub fn covering_radius(&self) -> f64 {
        let s = self.s;
        if s == 1 {
            return 0.5 * self.basis[(0, 0)].abs();
        }
        let rel = self.relevant();
        let mut best: f64 = 0.0;
        let m = rel.len();
        let mut idx = vec![0usize; s];
        // all s-subsets of the relevant vectors
        fn rec(
            start: usize,
            depth: usize,
            idx: &mut Vec<usize>,
            m: usize,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if depth == idx.len() {
                f(idx);
                return;
            }
            for i in start..m {
                idx[depth] = i;
                rec(i + 1, depth + 1, idx, m, f);
            }
        }
        let scale = rel.iter().map(|v| v.norm_squared()).fold(0.0, f64::max);
        rec(0, 0, &mut idx, m, &mut |sel| {
            let a = DMatrix::from_fn(s, s, |r, c| rel[sel[r]][c]);
            let b = DVector::from_fn(s, |r, _| 0.5 * rel[sel[r]].norm_squared());
            let Some(x) = a.lu().solve(&b) else {
                return;
            };
            if !x.iter().all(|v| v.is_finite()) {
                return;
            }
            let ok = rel
                .iter()
                .all(|c| c.dot(&x) <= 0.5 * c.norm_squared() + 1e-10 * scale);
            if ok {
                best = best.max(x.norm());
            }
        });
        best
    }

    /// Distance from the origin to the nearest translate of `delta` (given in
    /// lattice coordinates).
    pub fn distance(&self, delta: &[f64]) -> f64 {
        let s = self.s;
        let t = &self.lt * DVector::from_column_slice(delta);
        let c = &self.basis_inv * &t;
        let base: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
        let offsets: Vec<&[i64]> = (0..s).map(|_| &[-2i64, -1, 0, 1, 2][..]).collect();
        let mut best = f64::INFINITY;
        let mut k = vec![0i64; s];
        for_each_combo(&offsets, &mut |o| {
            for j in 0..s {
                k[j] = base[j] + o[j];
            }
            best = best.min((&t - self.vec(&k)).norm());
        });
        best
    }
}

fn for_each_combo(choices: &[&[i64]], f: &mut dyn FnMut(&[i64])) {
    let s = choices.len();
    let mut pos = vec![0usize; s];
    let mut k: Vec<i64> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&k);
        let mut j = 0;
        loop {
            if j == s {
                return;
            }
            pos[j] += 1;
            if pos[j] < choices[j].len() {
                k[j] = choices[j][pos[j]];
                break;
            }
            pos[j] = 0;
            k[j] = choices[j][0];
            j += 1;
        }
    }
}

/// LLL reduction (δ = 0.99) of the columns of `b`.
fn lll(mut b: DMatrix<f64>) -> DMatrix<f64> {
    let n = b.ncols();
    let delta = 0.99;
    let gram_schmidt = |b: &DMatrix<f64>| {
        let mut bs = b.clone();
        let mut mu = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let bj = bs.column(j).clone_owned();
                let m = b.column(i).dot(&bj) / bj.norm_squared();
                mu[(i, j)] = m;
                let upd = bs.column(i) - bj * m;
                bs.set_column(i, &upd);
            }
        }
        (bs, mu)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(&b);
            let q = mu[(k, j)].round();
            if q != 0.0 {
                let upd = b.column(k) - b.column(j) * q;
                b.set_column(k, &upd);
            }
        }
        let (bs, mu) = gram_schmidt(&b);
        let lhs = bs.column(k).norm_squared();
        let rhs = (delta - mu[(k, k - 1)].powi(2)) * bs.column(k - 1).norm_squared();
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Covering radius of `(ℤ^s, H)`.
pub fn covering_radius(h: &SymMat) -> Result<f64, SemiflatError> {
    Ok(FlatLattice::new(h)?.covering_radius())
}

/// Diameter of `(ℝ^s / p ℤ^s, H)`.
pub fn torus_diameter(h: &SymMat, period: f64) -> Result<f64, SemiflatError> {
    Ok(period * covering_radius(h)?)
}

/// Distance on `(ℝ^s / p ℤ^s, H)` between angles differing by
/// `delta · p` (so `delta` is in units of the period).
pub fn torus_distance(h: &SymMat, period: f64, delta: &[f64]) -> Result<f64, SemiflatError> {
    Ok(period * FlatLattice::new(h)?.distance(delta))
}

/// Diameter of the fiber torus over the base point `x`.
pub fn fiber_diameter(m: &SemiflatMetric, x: &[f64]) -> Result<f64, SemiflatError> {
    torus_diameter(&m.hessian(x)?, m.torus_period())
}
