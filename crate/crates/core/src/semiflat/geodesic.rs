//! Geodesic distance of the base metric `g_B = Σ φ_ij dx_i dx_j`.
//!
//! In one dimension the length element `√φ''` behaves like `1/x` at the
//! ends, so it is integrated against that weight exactly: on each cell
//! `√φ'' · y(1-y)` is interpolated linearly and
//! `∫ (α + βy) / (y(1-y)) dy = α log y - (α+β) log(1-y)`.
//! In two dimensions distances are shortest paths on the 16-neighbour grid
//! graph, each edge measured in the mean of its endpoint metrics.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::exec::Exec;
use crate::ma::MASolution;

use super::SemiflatError;

const NEIGHBOURS_2D: [(isize, isize); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 2),
    (-1, -2),
    (2, 1),
    (-2, -1),
    (1, -2),
    (-1, 2),
    (2, -1),
    (-2, 1),
];

fn too_close(sol: &MASolution, x: &[f64]) -> SemiflatError {
    let g = sol.grid();
    SemiflatError::BoundaryTooClose {
        point: x.to_vec(),
        slack: if x.len() == g.dim() {
            g.domain().slack(x)
        } else {
            f64::NAN
        },
        required: g.h(),
    }
}

/// Distance from `p` to every node of the grid.
pub(crate) struct DistanceMap {
    pub dist: Vec<f64>,
    /// predecessor node on a shortest path (2D), `usize::MAX` at the source
    pub pred: Vec<usize>,
    pub source: usize,
}

/// Cumulative 1D arc length at each node, measured from the first node.
fn cumulative_1d(sol: &MASolution) -> Vec<f64> {
    let g = sol.grid();
    let lam = g.scale();
    let weight: Vec<f64> = (0..g.len())
        .map(|i| {
            let y = g.ref_coords(i)[0];
            sol.hessians()[i].get(0, 0).sqrt() * lam * y * (1.0 - y)
        })
        .collect();
    let mut c = vec![0.0; g.len()];
    for i in 1..g.len() {
        let a = g.ref_coords(i - 1)[0];
        let b = g.ref_coords(i)[0];
        c[i] = c[i - 1] + cell_integral(a, b, weight[i - 1], weight[i], a, b);
    }
    c
}

/// `∫_{lo}^{hi} G(y) / (y(1-y)) dy` with `G` linear through `(a, ga)` and
/// `(b, gb)`.
fn cell_integral(a: f64, b: f64, ga: f64, gb: f64, lo: f64, hi: f64) -> f64 {
    let beta = (gb - ga) / (b - a);
    let alpha = ga - beta * a;
    let f = |y: f64| alpha * y.ln() - (alpha + beta) * (1.0 - y).ln();
    f(hi) - f(lo)
}

fn arc_1d(sol: &MASolution, cum: &[f64], x: f64) -> Result<f64, SemiflatError> {
    let g = sol.grid();
    let n = g.resolution() as f64;
    let y = g.to_ref(&[x])[0];
    let first = 1.0 / n;
    let last = (g.len() as f64) / n;
    if !(y >= first * (1.0 - 1e-12) && y <= last * (1.0 + 1e-12)) {
        return Err(too_close(sol, &[x]));
    }
    let i = (((y * n).floor() as usize).max(1) - 1).min(g.len() - 1);
    if i + 1 >= g.len() {
        return Ok(cum[g.len() - 1]);
    }
    let lam = g.scale();
    let (a, b) = (g.ref_coords(i)[0], g.ref_coords(i + 1)[0]);
    let w = |k: usize, y: f64| sol.hessians()[k].get(0, 0).sqrt() * lam * y * (1.0 - y);
    Ok(cum[i] + cell_integral(a, b, w(i, a), w(i + 1, b), a, y.clamp(a, b)))
}

#[derive(Copy, Clone, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn dijkstra_2d(sol: &MASolution, source: usize) -> DistanceMap {
    let g = sol.grid();
    let n = g.len();
    let h = g.h();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        let iu = g.index(u);
        let hu = sol.hessians()[u];
        for &(a, b) in &NEIGHBOURS_2D {
            let i0 = iu[0] as isize + a;
            let i1 = iu[1] as isize + b;
            if i0 < 0 || i1 < 0 {
                continue;
            }
            let Some(v) = g.node_at(&[i0 as usize, i1 as usize]) else {
                continue;
            };
            let e = [a as f64, b as f64];
            let hm = hu.add(&sol.hessians()[v]).scaled(0.5);
            let nd = d + h * hm.quad(&e).sqrt();
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    DistanceMap { dist, pred, source }
}

pub(crate) fn distance_map(sol: &MASolution, p: &[f64]) -> Result<DistanceMap, SemiflatError> {
    let g = sol.grid();
    if p.len() != g.dim() {
        return Err(SemiflatError::DimensionMismatch {
            expected: g.dim(),
            got: p.len(),
        });
    }
    match g.dim() {
        1 => {
            let cum = cumulative_1d(sol);
            let c = arc_1d(sol, &cum, p[0])?;
            let source = sol.nearest_node(p).ok_or_else(|| too_close(sol, p))?;
            Ok(DistanceMap {
                dist: cum.iter().map(|v| (v - c).abs()).collect(),
                pred: Vec::new(),
                source,
            })
        }
        2 => {
            let source = sol.nearest_node(p).ok_or_else(|| too_close(sol, p))?;
            Ok(dijkstra_2d(sol, source))
        }
        d => Err(SemiflatError::UnsupportedDimension(d)),
    }
}

/// Nodes on the shortest path from the source of `map` to `target`.
pub(crate) fn path_nodes(sol: &MASolution, map: &DistanceMap, target: usize) -> Vec<usize> {
    if sol.dim() == 1 {
        let (a, b) = if map.source <= target {
            (map.source, target)
        } else {
            (target, map.source)
        };
        return (a..=b).collect();
    }
    let mut out = vec![target];
    let mut cur = target;
    while cur != map.source && map.pred[cur] != usize::MAX {
        cur = map.pred[cur];
        out.push(cur);
    }
    out.reverse();
    out
}

/// Geodesic distance between two base points.
///
/// In 1D the points are used exactly; in 2D both are snapped to their nearest
/// grid nodes.
pub fn base_distance(sol: &MASolution, p: &[f64], q: &[f64]) -> Result<f64, SemiflatError> {
    base_distance_with(sol, p, q, Exec::default())
}

pub fn base_distance_with(
    sol: &MASolution,
    p: &[f64],
    q: &[f64],
    _exec: Exec,
) -> Result<f64, SemiflatError> {
    let g = sol.grid();
    for x in [p, q] {
        if x.len() != g.dim() {
            return Err(SemiflatError::DimensionMismatch {
                expected: g.dim(),
                got: x.len(),
            });
        }
    }
    match g.dim() {
        1 => {
            let cum = cumulative_1d(sol);
            Ok((arc_1d(sol, &cum, p[0])? - arc_1d(sol, &cum, q[0])?).abs())
        }
        2 => {
            let target = sol.nearest_node(q).ok_or_else(|| too_close(sol, q))?;
            Ok(distance_map(sol, p)?.dist[target])
        }
        d => Err(SemiflatError::UnsupportedDimension(d)),
    }
}

/// Length of the straight segment from `p` to `q` under the interpolated
/// base metric, by composite Simpson quadrature with `2 · resolution`
/// panels.
pub fn segment_length(sol: &MASolution, p: &[f64], q: &[f64]) -> Result<f64, SemiflatError> {
    let s = sol.dim();
    if p.len() != s || q.len() != s {
        return Err(SemiflatError::DimensionMismatch {
            expected: s,
            got: p.len().min(q.len()),
        });
    }
    let v: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let panels = 2 * sol.grid().resolution();
    let f = |t: f64| -> Result<f64, SemiflatError> {
        let x: Vec<f64> = p.iter().zip(&v).map(|(a, d)| a + t * d).collect();
        let h = sol.hessian_at(&x).ok_or_else(|| too_close(sol, &x))?;
        Ok(h.quad(&v).sqrt())
    };
    let dt = 1.0 / panels as f64;
    let mut acc = f(0.0)? + f(1.0)?;
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * dt)?;
    }
    Ok(acc * dt / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{closed_form_1d_correction, GridSpec};
    use crate::toric::SimplexDomain;
    use std::f64::consts::PI;

    fn exact_1d(res: usize) -> MASolution {
        let g = GridSpec::new(SimplexDomain::standard(1), res).unwrap();
        MASolution::from_barrier_correction(g, 1.0, |x| closed_form_1d_correction(1.0, x[0]))
            .unwrap()
    }

    fn antiderivative(x: f64) -> f64 {
        (PI * x / 2.0).tan().ln()
    }

    #[test]
    fn quarter_to_half() {
        let sol = exact_1d(2048);
        let d = base_distance(&sol, &[0.25], &[0.5]).unwrap();
        assert!((d - 0.88137).abs() < 1e-4, "{d}");
        assert!((d - (antiderivative(0.5) - antiderivative(0.25))).abs() < 1e-5);
        assert_eq!(base_distance(&sol, &[0.3], &[0.3]).unwrap(), 0.0);
    }

    #[test]
    fn completeness_probe() {
        let sol = exact_1d(2048);
        for eps in [1e-2, 1e-3] {
            let d = base_distance(&sol, &[0.5], &[eps]).unwrap();
            let r = d / -antiderivative(eps);
            assert!((r - 1.0).abs() < 1e-3, "eps {eps} ratio {r}");
        }
        assert!(base_distance(&sol, &[0.5], &[1e-4]).is_err());
    }
}
