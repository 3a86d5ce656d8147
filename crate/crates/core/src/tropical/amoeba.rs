//! Sampled amoebas `Log_t(V(p))` for real `t ∈ (0, 1)`.
//!
//! In two variables one coordinate is fixed on a grid of moduli
//! `|z_k| = t^{x_k}` and angles, the polynomial is solved for the other, and
//! the roles are then swapped so that both vertical and horizontal parts of
//! the amoeba are covered.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::exec::Exec;

use super::{Region, TropicalError, TropicalPolynomial};

/// Relative residual bound `|p(z)| / max_u |b_u t^{υ(u)} z^u|` at a witness.
pub const WITNESS_TOL: f64 = 1e-9;

/// Largest degree accepted by the root solver.
pub const DEGREE_CAP: usize = 64;

const MAX_POLISH: usize = 6;

/// Sweep of one coordinate over `resolution + 1` equally spaced values of the
/// region and `angles` equally spaced arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct AmoebaSampling {
    pub region: Region,
    pub resolution: usize,
    pub angles: usize,
}

impl AmoebaSampling {
    pub fn new(region: Region, resolution: usize, angles: usize) -> Result<Self, TropicalError> {
        if resolution == 0 || angles == 0 {
            return Err(TropicalError::BadRegion(
                "resolution and angle count must be positive".into(),
            ));
        }
        Ok(AmoebaSampling {
            region,
            resolution,
            angles,
        })
    }
}

/// Amoeba points with the approximate roots they come from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub witnesses: Vec<Vec<Complex64>>,
    /// Relative residual at each witness.
    pub residuals: Vec<f64>,
    pub t_abs: f64,
    pub tol: f64,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

/// Nonzero roots of `Σ c_k z^k`, coefficients in ascending order.
fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, String> {
    let zero = Complex64::new(0.0, 0.0);
    let lo = coeffs.iter().position(|c| *c != zero);
    let hi = coeffs.iter().rposition(|c| *c != zero);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Ok(Vec::new());
    };
    let c = &coeffs[lo..=hi];
    let d = c.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d > DEGREE_CAP {
        return Err(format!("degree {d} exceeds cap {DEGREE_CAP}"));
    }
    let lead = c[d];
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for k in 0..d {
        m[(0, k)] = -c[d - 1 - k] / lead;
        if k + 1 < d {
            m[(k + 1, k)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| "Schur iteration did not converge".to_string())?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| "Schur form not triangular".to_string())?;
    Ok(ev.iter().copied().collect())
}

fn polish(c: &[Complex64], z: Complex64) -> Complex64 {
    let (v, dv) = horner(c, z);
    if dv.norm() > 0.0 {
        let w = z - v / dv;
        if w.is_finite() && horner(c, w).0.norm() <= v.norm() {
            return w;
        }
    }
    z
}

fn residual(p: &TropicalPolynomial, z: &[Complex64], t_abs: f64) -> f64 {
    let terms = p.term_values(z, t_abs);
    let scale = terms.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let sum: Complex64 = terms.iter().sum();
    if scale > 0.0 && scale.is_finite() {
        sum.norm() / scale
    } else {
        f64::INFINITY
    }
}

type Hit = (Vec<f64>, Vec<Complex64>, f64);

/// Roots in the free coordinate `j` with every other coordinate fixed in
/// `z`, returned as witnessed points.
fn solve_fiber(
    p: &TropicalPolynomial,
    t_abs: f64,
    z: &[Complex64],
    j: usize,
    sample: &[f64],
) -> Result<Vec<Hit>, TropicalError> {
    let lt = t_abs.ln();
    let emin = p.terms().iter().map(|t| t.exponent[j]).min().unwrap_or(0);
    let emax = p.terms().iter().map(|t| t.exponent[j]).max().unwrap_or(0);
    let mut c = vec![Complex64::new(0.0, 0.0); (emax - emin) as usize + 1];
    for t in p.terms() {
        let mut v = t.coeff * (t.val as f64 * lt).exp();
        for (k, &e) in t.exponent.iter().enumerate() {
            if k != j {
                v *= z[k].powi(e as i32);
            }
        }
        c[(t.exponent[j] - emin) as usize] += v;
    }
    let fail = |reason: String| TropicalError::RootSolveFailure {
        sample: sample.to_vec(),
        reason,
    };
    let mut out = Vec::new();
    for r in roots(&c).map_err(fail)? {
        let mut w = z.to_vec();
        let mut zj = polish(&c, r);
        w[j] = zj;
        let mut res = residual(p, &w, t_abs);
        for _ in 0..MAX_POLISH {
            if res <= WITNESS_TOL {
                break;
            }
            zj = polish(&c, zj);
            w[j] = zj;
            res = residual(p, &w, t_abs);
        }
        if !(res <= WITNESS_TOL) {
            return Err(fail(format!(
                "witness residual {res:e} above {WITNESS_TOL:e}"
            )));
        }
        if zj.norm() == 0.0 || !zj.is_finite() {
            continue;
        }
        let x = w.iter().map(|v| v.norm().ln() / lt).collect();
        out.push((x, w, res));
    }
    Ok(out)
}

pub fn amoeba_sample(
    p: &TropicalPolynomial,
    t_abs: f64,
    sampling: &AmoebaSampling,
) -> Result<PointCloud, TropicalError> {
    amoeba_sample_with(p, t_abs, sampling, Exec::default())
}

pub fn amoeba_sample_with(
    p: &TropicalPolynomial,
    t_abs: f64,
    sampling: &AmoebaSampling,
    exec: Exec,
) -> Result<PointCloud, TropicalError> {
    if !(t_abs > 0.0 && t_abs < 1.0) {
        return Err(TropicalError::BadT(t_abs));
    }
    let n = p.nvars();
    let hits: Vec<Hit> = match n {
        1 => solve_fiber(p, t_abs, &[Complex64::new(0.0, 0.0)], 0, &[])?,
        2 => {
            let region = &sampling.region;
            if region.dim() != 2 {
                return Err(TropicalError::RegionMismatch {
                    region: region.dim(),
                    points: 2,
                });
            }
            let (res, na) = (sampling.resolution, sampling.angles);
            let per_axis = (res + 1) * na;
            let lt = t_abs.ln();
            let batches = exec.map_range(2 * per_axis, |idx| {
                let k = idx / per_axis;
                let i = (idx % per_axis) / na;
                let a = idx % na;
                let (lo, hi) = (region.lo()[k], region.hi()[k]);
                let x = if i == res {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / res as f64
                };
                let angle = 2.0 * PI * (a as f64 + 0.5) / na as f64;
                let mut z = vec![Complex64::new(0.0, 0.0); 2];
                z[k] = Complex64::from_polar((x * lt).exp(), angle);
                solve_fiber(p, t_abs, &z, 1 - k, &[k as f64, x, angle])
            });
            let mut all = Vec::new();
            for b in batches {
                all.extend(b?);
            }
            all
        }
        got => {
            return Err(TropicalError::UnsupportedArity {
                supported: "1 or 2",
                got,
            })
        }
    };
    if hits.is_empty() {
        return Err(TropicalError::EmptyVariety);
    }
    let mut hits = hits;
    hits.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .chain(
                a.1.iter()
                    .zip(&b.1)
                    .flat_map(|(u, v)| [u.re.total_cmp(&v.re), u.im.total_cmp(&v.im)]),
            )
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut cloud = PointCloud {
        points: Vec::with_capacity(hits.len()),
        witnesses: Vec::with_capacity(hits.len()),
        residuals: Vec::with_capacity(hits.len()),
        t_abs,
        tol: WITNESS_TOL,
    };
    for (x, w, r) in hits {
        cloud.points.push(x);
        cloud.witnesses.push(w);
        cloud.residuals.push(r);
    }
    Ok(cloud)
}
