use proptest::prelude::*;

use kecollapse_core::ma::{hessian_field, solve_real_ma, standard_domain, MASolution};

fn solve(dim: usize, kappa: f64, res: usize) -> MASolution {
    solve_real_ma(standard_domain(dim).unwrap(), kappa, res, 1e-10).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kappa_shift(dim in 1usize..=2, kappa in 0.05f64..20.0) {
        let res = if dim == 1 { 64 } else { 16 };
        let a = solve(dim, kappa, res);
        let b = solve(dim, 1.0, res);
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - (y - 0.5 * kappa.ln())).abs() <= 1e-8);
        }
    }

    #[test]
    fn hessians_are_positive_definite(dim in 1usize..=3, kappa in 0.1f64..10.0) {
        let res = [64, 16, 8][dim - 1];
        let sol = solve(dim, kappa, res);
        let h = hessian_field(&sol).unwrap();
        prop_assert!(h.iter().all(|m| m.is_spd()));
    }

    #[test]
    fn triangle_symmetry(kappa in 0.1f64..10.0) {
        let sol = solve(2, kappa, 16);
        let g = sol.grid();
        let n = g.resolution();
        for i in 0..g.len() {
            let [a, b, _] = g.index(i);
            let c = n - a - b;
            for (p, q) in [(b, a), (c, a), (b, c)] {
                let j = g.node_at(&[p, q]).unwrap();
                prop_assert!((sol.values()[i] - sol.values()[j]).abs() <= 1e-10);
            }
        }
    }
}

/// Sup error against `-log(sin(πx)/π)` on `[0.05, 0.95]`.
fn oracle_error(res: usize) -> f64 {
    let sol = solve(1, 1.0, res);
    let g = sol.grid();
    (0..g.len())
        .filter_map(|i| {
            let x = g.coords(i)[0];
            (0.05..=0.95).contains(&x).then(|| {
                (sol.values()[i] + ((std::f64::consts::PI * x).sin() / std::f64::consts::PI).ln())
                    .abs()
            })
        })
        .fold(0.0, f64::max)
}

#[test]
fn one_dimensional_error_is_second_order() {
    let errs: Vec<f64> = [64, 128, 256].iter().map(|&r| oracle_error(r)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn interior_values_stabilise_under_refinement() {
    let sols: Vec<MASolution> = [8, 16, 32].iter().map(|&r| solve(2, 1.0, r)).collect();
    let diff = |c: &MASolution, f: &MASolution| {
        let (gc, gf) = (c.grid(), f.grid());
        (0..gc.len())
            .filter(|&i| gc.slack(i) >= 0.05)
            .map(|i| {
                let [a, b, _] = gc.index(i);
                (c.values()[i] - f.values()[gf.node_at(&[2 * a, 2 * b]).unwrap()]).abs()
            })
            .fold(0.0, f64::max)
    };
    let ratio = diff(&sols[0], &sols[1]) / diff(&sols[1], &sols[2]);
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}
