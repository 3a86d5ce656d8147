use crate::exec::Exec;
use crate::toric::SimplexDomain;

use super::banded::Banded;
use super::grid::{GridSpec, NONE};
use super::stencil::{
    barrier, barrier_hessian, barrier_weight, direction_weights, directions,
    hessian_from_differences, second_differences, Direction, SymMat,
};
use super::{Closure, MASolution, MaError, SolveMode, DEFAULT_TOL};

const MAX_NEWTON: usize = 60;
const STEP_TOL: f64 = 1e-11;
const MIN_DAMPING: f64 = 1.0 / 1_048_576.0;
const EXHAUSTION_STEP: f64 = 4.0;
/// Slack defining the interior compact on which exhaustion saturation is
/// measured.
const COMPACT_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub mode: SolveMode,
    pub tol: f64,
    /// Largest boundary value tried in exhaustion mode.
    pub exhaustion_cap: f64,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: SolveMode::Barrier,
            tol: DEFAULT_TOL,
            exhaustion_cap: 64.0,
            exec: Exec::default(),
        }
    }
}

/// Barrier-mode solve with default options and the given tolerance.
pub fn solve_real_ma(
    domain: SimplexDomain,
    kappa: f64,
    resolution: usize,
    tol: f64,
) -> Result<MASolution, MaError> {
    solve_real_ma_with(
        domain,
        kappa,
        resolution,
        &SolveOptions {
            tol,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_real_ma_with(
    domain: SimplexDomain,
    kappa: f64,
    resolution: usize,
    opts: &SolveOptions,
) -> Result<MASolution, MaError> {
    validate(kappa, opts.tol)?;
    if domain.dim() == 0 {
        return Ok(empty_solution(domain, kappa));
    }
    let grid = GridSpec::new(domain, resolution)?;
    match opts.mode {
        SolveMode::Barrier => solve_barrier(grid, kappa, opts),
        SolveMode::Exhaustion => solve_exhaustion(grid, kappa, opts),
    }
}

/// Single Dirichlet solve with constant boundary value `m`, the building
/// block of exhaustion mode.
pub fn solve_dirichlet(
    domain: SimplexDomain,
    kappa: f64,
    resolution: usize,
    m: f64,
    opts: &SolveOptions,
) -> Result<MASolution, MaError> {
    validate(kappa, opts.tol)?;
    let grid = GridSpec::new(domain, resolution)?;
    let p = Problem::new(&grid, kappa, Closure::Plain, opts.exec);
    let mut closed = dirichlet_start(&grid, kappa, m);
    let iters = p.newton(&mut closed, opts.tol)?;
    Ok(p.finish(grid.clone(), closed, iters))
}

fn validate(kappa: f64, tol: f64) -> Result<(), MaError> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(MaError::NonPositiveKappa(kappa));
    }
    if !(tol > 0.0) {
        return Err(MaError::BadTolerance(tol));
    }
    Ok(())
}

fn empty_solution(domain: SimplexDomain, kappa: f64) -> MASolution {
    // dimension 0 has a single point and no Hessian; φ is left undefined
    let grid = GridSpec::new(domain, 8).expect("0-dimensional grid");
    MASolution {
        grid,
        kappa,
        values: Vec::new(),
        hessians: Vec::new(),
        residual_sup: 0.0,
        newton_iters: 0,
        closure: Closure::Barrier,
        closed: Vec::new(),
    }
}

fn solve_barrier(grid: GridSpec, kappa: f64, opts: &SolveOptions) -> Result<MASolution, MaError> {
    let s = grid.dim();
    let n = grid.resolution();
    // corrections on the faces, lowest dimension first
    let mut faces: Vec<(GridSpec, Vec<f64>)> = Vec::new();
    let mut total_iters = 0;
    for k in 1..=s {
        let g = if k == s {
            grid.clone()
        } else {
            GridSpec::new(SimplexDomain::standard(k), n)?
        };
        let mut closed = barrier_closure(&g, kappa, &faces);
        let p = Problem::new(&g, kappa, Closure::Barrier, opts.exec);
        let iters = p.newton(&mut closed, opts.tol)?;
        if k == s {
            total_iters += iters;
            return Ok(p.finish(g.clone(), closed, total_iters));
        }
        total_iters += iters;
        faces.push((g, closed));
    }
    unreachable!("loop returns at k == s")
}

/// Closed-grid array for barrier mode: boundary points carry the face
/// correction, interior points the constant initial guess `-½ log κ`.
fn barrier_closure(g: &GridSpec, kappa: f64, faces: &[(GridSpec, Vec<f64>)]) -> Vec<f64> {
    let c0 = -0.5 * kappa.ln();
    let mut closed = vec![f64::NAN; g.dense_len()];
    for (d, slot) in closed.iter_mut().enumerate() {
        if !g.in_closed(d) {
            continue;
        }
        let nz: Vec<usize> = g.slots(d).into_iter().filter(|&m| m > 0).collect();
        let k = nz.len() - 1;
        *slot = if k == 0 || k == g.dim() {
            c0
        } else {
            let (fg, fv) = &faces[k - 1];
            let node = fg
                .node_at(&nz[1..])
                .expect("face point is interior to its face");
            fv[fg.dense(node)]
        };
    }
    closed
}

fn dirichlet_start(g: &GridSpec, kappa: f64, m: f64) -> Vec<f64> {
    let s = g.dim() as f64;
    let lambda_shift = s * g.scale().ln();
    let m_ref = m + lambda_shift;
    let target = 1.2 - 0.5 * kappa.ln() + lambda_shift;
    let amp = (s + 1.0) * (m_ref - target).max(0.5);
    let nf = g.resolution() as f64;
    let mut closed = vec![f64::NAN; g.dense_len()];
    for (d, slot) in closed.iter_mut().enumerate() {
        if !g.in_closed(d) {
            continue;
        }
        let slots = g.slots(d);
        *slot = if slots.iter().any(|&v| v == 0) {
            m_ref
        } else {
            let gm = slots.iter().map(|&v| (v as f64 / nf).ln()).sum::<f64>() / (s + 1.0);
            m_ref - amp * gm.exp()
        };
    }
    closed
}

fn solve_exhaustion(
    grid: GridSpec,
    kappa: f64,
    opts: &SolveOptions,
) -> Result<MASolution, MaError> {
    let p = Problem::new(&grid, kappa, Closure::Plain, opts.exec);
    let compact: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.slack(i) >= COMPACT_SLACK)
        .collect();
    let target = opts.tol / 10.0;
    let mut m = EXHAUSTION_STEP;
    let mut closed = dirichlet_start(&grid, kappa, m);
    let mut total = p.newton(&mut closed, opts.tol)?;
    let mut last_change = f64::INFINITY;
    while m + EXHAUSTION_STEP <= opts.exhaustion_cap {
        m += EXHAUSTION_STEP;
        let mut next = closed.clone();
        for v in next.iter_mut() {
            *v += EXHAUSTION_STEP;
        }
        total += p.newton(&mut next, opts.tol)?;
        last_change = compact
            .iter()
            .map(|&i| {
                let d = grid.dense(i);
                (next[d] - closed[d]).abs()
            })
            .fold(0.0, f64::max);
        closed = next;
        if last_change < target {
            return Ok(p.finish(grid.clone(), closed, total));
        }
    }
    Err(MaError::ExhaustionNotSaturated {
        last_m: m,
        last_change,
        target,
    })
}

struct Problem<'a> {
    g: &'a GridSpec,
    kappa: f64,
    closure: Closure,
    exec: Exec,
    dirs: Vec<Direction>,
    h_ref: f64,
    /// per node: barrier Hessian and weight (barrier closure only)
    bh: Vec<SymMat>,
    bw: Vec<f64>,
    /// per node and direction: node numbers of the + and - neighbours
    nbr: Vec<[usize; 12]>,
    band: usize,
}

impl<'a> Problem<'a> {
    fn new(g: &'a GridSpec, kappa: f64, closure: Closure, exec: Exec) -> Self {
        let dirs = directions(g);
        let n = g.len();
        let (bh, bw) = if closure == Closure::Barrier {
            let v: Vec<(SymMat, f64)> = exec.map_range(n, |i| {
                let y = g.ref_coords(i);
                (barrier_hessian(&y), barrier_weight(&y))
            });
            v.into_iter().unzip()
        } else {
            (Vec::new(), Vec::new())
        };
        let mut band = 0;
        let nbr: Vec<[usize; 12]> = (0..n)
            .map(|i| {
                let c = g.dense(i) as isize;
                let mut out = [NONE; 12];
                for (k, d) in dirs.iter().enumerate() {
                    for (j, sign) in [1isize, -1].into_iter().enumerate() {
                        let q = g.node_of_dense((c + sign * d.offset) as usize);
                        if q != NONE {
                            band = band.max(q.abs_diff(i));
                        }
                        out[2 * k + j] = q;
                    }
                }
                out
            })
            .collect();
        Problem {
            g,
            kappa,
            closure,
            exec,
            dirs,
            h_ref: 1.0 / g.resolution() as f64,
            bh,
            bw,
            nbr,
            band,
        }
    }

    /// Hessian (standard coordinates), signed relative residual and the row
    /// scale `1 / (κ e^{2φ})` expressed in the stored unknown, per node.
    fn eval(&self, closed: &[f64]) -> Vec<(SymMat, f64, f64)> {
        let s = self.g.dim();
        self.exec.map_range(self.g.len(), |i| {
            let c = self.g.dense(i);
            let mut dd = [0.0; 6];
            second_differences(closed, c, &self.dirs, 1, self.h_ref, &mut dd);
            let mut h = hessian_from_differences(s, &self.dirs, &dd);
            let u = closed[c];
            let scale = match self.closure {
                Closure::Barrier => {
                    h = h.add(&self.bh[i]);
                    self.bw[i] * (-2.0 * u).exp() / self.kappa
                }
                Closure::Plain => (-2.0 * u).exp() / self.kappa,
            };
            (h, scale * h.det() - 1.0, scale)
        })
    }

    fn newton(&self, closed: &mut [f64], tol: f64) -> Result<usize, MaError> {
        let n = self.g.len();
        let mut ev = self.eval(closed);
        if let Some(node) = ev.iter().position(|e| !e.0.is_spd()) {
            return Err(MaError::LossOfConvexity {
                node,
                coords: self.g.coords(node),
            });
        }
        let sup = |ev: &[(SymMat, f64, f64)]| ev.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
        let mut res = sup(&ev);
        let mut trace = vec![res];
        let mut iters = 0;
        let inv_h2 = 1.0 / (self.h_ref * self.h_ref);
        while iters < MAX_NEWTON {
            let mut jac = Banded::zeros(n, self.band, self.band);
            let mut rhs = vec![0.0; n];
            let mut w = [0.0; 6];
            for i in 0..n {
                let (h, g, scale) = &ev[i];
                direction_weights(&h.cofactor().scaled(*scale), &self.dirs, &mut w);
                let mut diag = -2.0;
                for (k, wk) in w.iter().take(self.dirs.len()).enumerate() {
                    let a = wk * inv_h2;
                    diag -= 2.0 * a;
                    for j in 0..2 {
                        let q = self.nbr[i][2 * k + j];
                        if q != NONE {
                            jac.add(i, q, a);
                        }
                    }
                }
                jac.add(i, i, diag);
                rhs[i] = -g;
            }
            if jac.factor().is_err() {
                return Err(MaError::NewtonDiverged { trace });
            }
            jac.solve(&mut rhs);
            let step = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));

            let mut alpha = 1.0;
            let mut accepted = None;
            let mut spd_failure = None;
            let mut trial = closed.to_vec();
            while alpha >= MIN_DAMPING {
                for i in 0..n {
                    let d = self.g.dense(i);
                    trial[d] = closed[d] + alpha * rhs[i];
                }
                let ev_t = self.eval(&trial);
                if let Some(node) = ev_t.iter().position(|e| !e.0.is_spd()) {
                    spd_failure = Some(node);
                    alpha *= 0.5;
                    continue;
                }
                let r = sup(&ev_t);
                if r <= (1.0 - 1e-4 * alpha) * res {
                    accepted = Some((ev_t, r));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((ev_t, r)) = accepted else {
                // no decrease left: either converged to round-off or stuck
                if res <= tol {
                    return Ok(iters);
                }
                if let Some(node) = spd_failure {
                    return Err(MaError::LossOfConvexity {
                        node,
                        coords: self.g.coords(node),
                    });
                }
                return Err(MaError::NewtonDiverged { trace });
            };
            closed.copy_from_slice(&trial);
            ev = ev_t;
            res = r;
            trace.push(res);
            iters += 1;
            if alpha == 1.0 && step <= STEP_TOL && res <= tol {
                return Ok(iters);
            }
        }
        if res <= tol {
            Ok(iters)
        } else {
            Err(MaError::NewtonDiverged { trace })
        }
    }

    fn finish(&self, grid: GridSpec, closed: Vec<f64>, iters: usize) -> MASolution {
        let ev = self.eval(&closed);
        let lambda = grid.scale();
        let shift = grid.dim() as f64 * lambda.ln();
        let inv_l2 = 1.0 / (lambda * lambda);
        let values = self.exec.map_range(grid.len(), |i| {
            let u = closed[grid.dense(i)];
            let phi_ref = match self.closure {
                Closure::Barrier => u + barrier(&grid.ref_coords(i)),
                Closure::Plain => u,
            };
            phi_ref - shift
        });
        let hessians = ev.iter().map(|e| e.0.scaled(inv_l2)).collect();
        let residual_sup = ev.iter().fold(0.0f64, |m, e| m.max(e.1.abs()));
        MASolution {
            grid,
            kappa: self.kappa,
            values,
            hessians,
            residual_sup,
            newton_iters: iters,
            closure: self.closure.clone(),
            closed,
        }
    }
}

/// Physical Hessians and unsigned relative residuals recomputed from the
/// stored closed-grid samples.
pub(crate) fn evaluate(sol: &MASolution, exec: Exec) -> (Vec<SymMat>, Vec<f64>) {
    if sol.grid.dim() == 0 {
        return (Vec::new(), Vec::new());
    }
    let p = Problem::new(&sol.grid, sol.kappa, sol.closure.clone(), exec);
    let l = sol.grid.scale();
    let inv_l2 = 1.0 / (l * l);
    p.eval(&sol.closed)
        .into_iter()
        .map(|(h, g, _)| (h.scaled(inv_l2), g.abs()))
        .unzip()
}

/// Dense closed-grid array of `log det D²φ - 2φ` at the nodes (NaN
/// elsewhere). The value is the same in standard and physical coordinates.
pub(crate) fn log_det_field(sol: &MASolution, exec: Exec) -> Vec<f64> {
    let g = &sol.grid;
    let p = Problem::new(g, sol.kappa, sol.closure.clone(), exec);
    let ev = p.eval(&sol.closed);
    let mut out = vec![f64::NAN; g.dense_len()];
    for (i, (h, _, _)) in ev.iter().enumerate() {
        let d = g.dense(i);
        let u = sol.closed[d];
        out[d] = match sol.closure {
            // log det H - 2(B + ψ) = log(det H · Π y_j²) - 2ψ
            Closure::Barrier => (h.det() * p.bw[i]).ln() - 2.0 * u,
            Closure::Plain => h.det().ln() - 2.0 * u,
        };
    }
    out
}

pub(crate) fn assemble_sampled(
    grid: GridSpec,
    kappa: f64,
    closure: Closure,
    f: impl Fn(&[f64]) -> f64,
) -> Result<MASolution, MaError> {
    validate(kappa, 1.0)?;
    let (delta, lambda) = (grid.domain().margin(), grid.scale());
    let shift = grid.dim() as f64 * lambda.ln();
    let nf = grid.resolution() as f64;
    let mut closed = vec![f64::NAN; grid.dense_len()];
    for (d, slot) in closed.iter_mut().enumerate() {
        if !grid.in_closed(d) {
            continue;
        }
        let x: Vec<f64> = grid.dense_index(d)[..grid.dim()]
            .iter()
            .map(|&k| delta + lambda * k as f64 / nf)
            .collect();
        // both φ and ψ pick up the same constant under the affine map
        *slot = f(&x) + shift;
    }
    let p = Problem::new(&grid, kappa, closure, Exec::default());
    Ok(p.finish(grid.clone(), closed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{closed_form_1d, ma_residual};

    #[test]
    fn one_dimensional_barrier_matches_closed_form() {
        let sol = solve_real_ma(SimplexDomain::standard(1), 1.0, 256, 1e-10).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..sol.grid().len() {
            let x = sol.grid().coords(i)[0];
            if (0.05..=0.95).contains(&x) {
                err = err.max((sol.values()[i] - closed_form_1d(1.0, x).unwrap()).abs());
            }
        }
        assert!(err < 1e-6, "err {err}");
        assert!(sol.residual_sup() <= 1e-10);
    }

    #[test]
    fn residual_recomputation_agrees() {
        let sol = solve_real_ma(SimplexDomain::standard(2), 1.0, 16, 1e-9).unwrap();
        let r = ma_residual(&sol);
        assert!((r.sup - sol.residual_sup()).abs() <= 1e-12);
    }

    #[test]
    fn dirichlet_is_monotone_in_boundary_value() {
        let opts = SolveOptions::default();
        let d = SimplexDomain::standard(1);
        let a = solve_dirichlet(d, 1.0, 64, 4.0, &opts).unwrap();
        let b = solve_dirichlet(d, 1.0, 64, 8.0, &opts).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!(y >= x);
        }
    }
}
