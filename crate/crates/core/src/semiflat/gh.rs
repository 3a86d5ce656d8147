//! Gromov-Hausdorff shadow of the collapse: total-space distances versus
//! base distances.
//!
//! The total-space distance between `(x, θ₁)` and `(y, θ₂)` is bounded above
//! by travelling in the base to some point `z`, crossing the fiber over `z`,
//! and continuing to `y`:
//!
//! ```text
//! d_total = min_z  d_B(x, z) + d_{T_z}(θ₁, θ₂) + d_B(z, y),
//! ```
//!
//! minimised over grid nodes `z`. Projection to the base is 1-Lipschitz, so
//! `d_B(x, y) ≤ d_total`, and the fiber term is at most the fiber diameter
//! anywhere along a base geodesic. The discrepancy `d_total - d_B` therefore
//! lies between zero and the largest fiber diameter on that geodesic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;

use super::geodesic::{distance_map, path_nodes};
use super::metric::SemiflatMetric;
use super::torus::FlatLattice;
use super::SemiflatError;

/// A point of the total space: base coordinates and angles in units of the
/// torus period.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalPoint {
    pub x: Vec<f64>,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub d_base: f64,
    pub d_total: f64,
    pub discrepancy: f64,
    /// Largest fiber diameter over the nodes of the base geodesic.
    pub fiber_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhReport {
    pub pairs: Vec<PairReport>,
    pub sup_discrepancy: f64,
    pub max_fiber_bound: f64,
}

/// The base point used for pointed convergence: barycenter of the base with
/// all angles zero.
pub fn base_point(m: &SemiflatMetric) -> TotalPoint {
    let s = m.dim();
    TotalPoint {
        x: m.base().grid().domain().barycenter(),
        theta: vec![0.0; s],
    }
}

/// Seeded random pairs of total-space points whose base points have slack at
/// least `min_slack`.
pub fn random_pairs(
    s: usize,
    count: usize,
    seed: u64,
    min_slack: f64,
) -> Vec<(TotalPoint, TotalPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| loop {
        let x: Vec<f64> = (0..s).map(|_| rng.random_range(0.0..1.0)).collect();
        let x0 = 1.0 - x.iter().sum::<f64>();
        if x.iter()
            .chain(std::iter::once(&x0))
            .all(|&v| v >= min_slack)
        {
            let theta = (0..s).map(|_| rng.random_range(0.0..1.0)).collect();
            return TotalPoint { x, theta };
        }
    };
    (0..count)
        .map(|_| {
            let a = point(&mut rng);
            let b = point(&mut rng);
            (a, b)
        })
        .collect()
}

pub fn gh_discrepancy(
    m: &SemiflatMetric,
    pairs: &[(TotalPoint, TotalPoint)],
) -> Result<GhReport, SemiflatError> {
    gh_discrepancy_with(m, pairs, Exec::default())
}

pub fn gh_discrepancy_with(
    m: &SemiflatMetric,
    pairs: &[(TotalPoint, TotalPoint)],
    exec: Exec,
) -> Result<GhReport, SemiflatError> {
    let sol = m.base();
    let s = sol.dim();
    for (a, b) in pairs {
        for p in [a, b] {
            if p.x.len() != s || p.theta.len() != s {
                return Err(SemiflatError::DimensionMismatch {
                    expected: s,
                    got: p.x.len().min(p.theta.len()),
                });
            }
        }
    }
    let lattices = exec
        .map(sol.hessians(), FlatLattice::new)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let period = m.torus_period();
    let results = exec.map(pairs, |(a, b)| -> Result<PairReport, SemiflatError> {
        let map_a = distance_map(sol, &a.x)?;
        let map_b = distance_map(sol, &b.x)?;
        let d_base = if s == 1 {
            super::geodesic::base_distance(sol, &a.x, &b.x)?
        } else {
            map_a.dist[map_b.source]
        };
        let delta: Vec<f64> = a.theta.iter().zip(&b.theta).map(|(u, v)| v - u).collect();
        let mut d_total = f64::INFINITY;
        for z in 0..sol.grid().len() {
            let base = map_a.dist[z] + map_b.dist[z];
            if base >= d_total {
                continue;
            }
            d_total = d_total.min(base + period * lattices[z].distance(&delta));
        }
        let fiber_bound = path_nodes(sol, &map_a, map_b.source)
            .into_iter()
            .map(|z| period * lattices[z].covering_radius())
            .fold(0.0, f64::max);
        Ok(PairReport {
            d_base,
            d_total,
            discrepancy: (d_total - d_base).abs(),
            fiber_bound,
        })
    });
    let pairs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let sup_discrepancy = pairs.iter().map(|p| p.discrepancy).fold(0.0, f64::max);
    let max_fiber_bound = pairs.iter().map(|p| p.fiber_bound).fold(0.0, f64::max);
    Ok(GhReport {
        pairs,
        sup_discrepancy,
        max_fiber_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{closed_form_1d_correction, GridSpec, MASolution};
    use crate::semiflat::{fiber_diameter, semiflat_metric};
    use crate::toric::SimplexDomain;

    fn exact_1d(res: usize) -> MASolution {
        let g = GridSpec::new(SimplexDomain::standard(1), res).unwrap();
        MASolution::from_barrier_correction(g, 1.0, |x| closed_form_1d_correction(1.0, x[0]))
            .unwrap()
    }

    #[test]
    fn same_fiber_pair() {
        let sol = exact_1d(256);
        let m = semiflat_metric(&sol, (-10.0f64).exp()).unwrap();
        let a = TotalPoint {
            x: vec![0.5],
            theta: vec![0.1],
        };
        let b = TotalPoint {
            x: vec![0.5],
            theta: vec![0.6],
        };
        let r = gh_discrepancy(&m, &[(a, b)]).unwrap();
        let p = &r.pairs[0];
        assert!(p.d_base.abs() < 1e-15);
        assert!(p.d_total <= fiber_diameter(&m, &[0.5]).unwrap() + 1e-12);
    }

    #[test]
    fn projection_is_lipschitz_and_bounded() {
        let sol = exact_1d(256);
        let m = semiflat_metric(&sol, (-5.0f64).exp()).unwrap();
        let pairs = random_pairs(1, 30, 3, 0.05);
        let r = gh_discrepancy(&m, &pairs).unwrap();
        for p in &r.pairs {
            assert!(p.d_total >= p.d_base - 1e-12);
            assert!(p.discrepancy <= 2.0 * p.fiber_bound + 1e-12);
        }
    }

    #[test]
    fn equal_angles_give_no_discrepancy() {
        let sol = exact_1d(128);
        let m = semiflat_metric(&sol, 0.1).unwrap();
        let a = TotalPoint {
            x: vec![0.2],
            theta: vec![0.3],
        };
        let b = TotalPoint {
            x: vec![0.7],
            theta: vec![0.3],
        };
        let r = gh_discrepancy(&m, &[(a, b)]).unwrap();
        assert!(r.sup_discrepancy < 1e-12);
    }
}
