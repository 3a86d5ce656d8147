use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use kecollapse_core::ma::{
    closed_form_1d_correction, solve_real_ma, standard_domain, GridSpec, MASolution,
};
use kecollapse_core::semiflat::{
    einstein_samples, fiber_diameter, gh_discrepancy, random_pairs, ricci_residual, special_defect,
    special_phase, AffineTorus, FlatLimitData, SemiflatMetric,
};
use kecollapse_core::toric::SimplexDomain;

fn triangle() -> &'static MASolution {
    static SOL: OnceLock<MASolution> = OnceLock::new();
    SOL.get_or_init(|| solve_real_ma(standard_domain(2).unwrap(), 1.0, 32, 1e-10).unwrap())
}

fn interval() -> &'static MASolution {
    static SOL: OnceLock<MASolution> = OnceLock::new();
    SOL.get_or_init(|| solve_real_ma(standard_domain(1).unwrap(), 1.0, 512, 1e-10).unwrap())
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn spd(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |i, j| entries[i * 3 + j]);
    &a * a.transpose() + DMatrix::identity(n, n) * 0.1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_blocks_agree(x in 0.1f64..0.6, y in 0.1f64..0.3, l in 0.5f64..40.0) {
        let m = SemiflatMetric::from_neg_log_t(triangle(), l).unwrap();
        let g = m.metric_at(&[x, y]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert_eq!(g[(i, j)], g[(i + 2, j + 2)]);
                prop_assert_eq!(g[(i, j + 2)], 0.0);
            }
        }
    }

    #[test]
    fn fibers_are_lagrangian(
        n in 1usize..=3,
        entries in prop::collection::vec(-2.0f64..2.0, 9),
        r in 0.01f64..100.0,
        arg in -PI..PI,
    ) {
        let f = FlatLimitData::new(spd(n, &entries), Complex64::from_polar(r, arg)).unwrap();
        let d = special_defect(&f, &AffineTorus::coordinate(vec![0.3; n])).unwrap();
        prop_assert!(d.lagrangian <= 1e-12);
        prop_assert!(d.imaginary <= 1e-12 * r);
    }

    #[test]
    fn collapse_rate_is_independent_of_t(x in 0.05f64..0.95, l in 0.1f64..200.0) {
        let sol = interval();
        let a = fiber_diameter(&SemiflatMetric::from_neg_log_t(sol, l).unwrap(), &[x]).unwrap();
        let b = fiber_diameter(&SemiflatMetric::from_neg_log_t(sol, 1.0).unwrap(), &[x]).unwrap();
        prop_assert!((a * l - b).abs() <= 1e-13 * b);
    }

    #[test]
    fn phase_is_projective(
        n in 1usize..=4,
        r in 1e-3f64..1e3,
        arg in -PI..PI,
        lambda in 1e-3f64..1e3,
    ) {
        let z = Complex64::from_polar(r, arg);
        let p = special_phase(z, n).unwrap();
        prop_assert!((0.0..PI).contains(&p));
        prop_assert!(circle_gap(special_phase(z * lambda, n).unwrap(), p) <= 1e-12);
        prop_assert!(circle_gap(special_phase(-z, n).unwrap(), p) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn projection_is_one_lipschitz(seed in any::<u64>(), l in 1.0f64..30.0) {
        let m = SemiflatMetric::from_neg_log_t(triangle(), l).unwrap();
        let r = gh_discrepancy(&m, &random_pairs(2, 6, seed, 0.08)).unwrap();
        for p in &r.pairs {
            prop_assert!(p.d_base <= p.d_total + 1e-12);
            prop_assert!(p.discrepancy <= 2.0 * p.fiber_bound);
        }
    }
}

#[test]
fn log_det_minus_twice_phi_is_flat_for_the_exact_solution() {
    for kappa in [0.5, 1.0, 3.0] {
        let g = GridSpec::new(SimplexDomain::standard(1), 1000).unwrap();
        let sol = MASolution::from_barrier_correction(g, kappa, |x| {
            closed_form_1d_correction(kappa, x[0])
        })
        .unwrap();
        let m = SemiflatMetric::from_neg_log_t(&sol, 3.0).unwrap();
        assert!(ricci_residual(&m, &einstein_samples(&sol)).unwrap() <= 1e-4);
    }
}
