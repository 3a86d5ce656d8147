use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

use kecollapse_core::toric::{
    cell_polytope, dual_cone, fibration_base, gorenstein_covector, log_map, Cone,
};

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
    v.iter().map(|x| x / g).collect()
}

/// Full-dimensional simplicial cones in rank 2 or 3 with small entries.
fn simplicial() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (2usize..=3)
        .prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-4i64..=4, d), d))
        .prop_filter("independent", |m| det(m) != 0)
        .prop_map(|m| m.iter().map(|r| primitive(r)).collect())
}

fn sorted(mut v: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    v.sort();
    v
}

proptest! {
    #[test]
    fn biduality(rays in simplicial()) {
        let c = Cone::from_i64(&rays).unwrap();
        let cc = dual_cone(&dual_cone(&c).unwrap()).unwrap();
        prop_assert_eq!(sorted(cc.rays().to_vec()), sorted(c.rays().to_vec()));
    }

    #[test]
    fn gorenstein_pairing_is_one(rays in simplicial()) {
        let c = Cone::from_i64(&rays).unwrap();
        if let Ok(u) = gorenstein_covector(&c) {
            prop_assert!(u.is_integral());
            for v in c.rays() {
                prop_assert!(u.pair(v).is_one());
            }
            let p = cell_polytope(&c, &u).unwrap();
            prop_assert_eq!(p.dim(), c.rays().len() - 1);
        }
    }

    #[test]
    fn faces_of_unimodular_cones_are_gorenstein(k in 1usize..=3) {
        let rays: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..3).map(|j| i64::from(i == j)).collect())
            .collect();
        let c = Cone::from_i64(&rays).unwrap();
        let u = gorenstein_covector(&c).unwrap();
        prop_assert_eq!(cell_polytope(&c, &u).unwrap().dim(), k - 1);
    }

    #[test]
    fn log_map_is_additive(
        a in prop::collection::vec(1e-3f64..1e3, 1..4),
        b_scale in prop::collection::vec(1e-3f64..1e3, 4),
        t in 1e-6f64..0.9,
    ) {
        let b = &b_scale[..a.len()];
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        let la = log_map(&a, t).unwrap();
        let lb = log_map(b, t).unwrap();
        let lp = log_map(&prod, t).unwrap();
        for k in 0..a.len() {
            prop_assert!((lp[k] - la[k] - lb[k]).abs() <= 1e-12 * (1.0 + lp[k].abs()));
        }
    }

    #[test]
    fn fibration_base_grows_as_t_shrinks(
        s in 1usize..=3,
        t in 1e-6f64..0.5,
        ratio in 0.01f64..0.99,
        eps in 0.5f64..0.99,
    ) {
        let Ok(inner) = fibration_base(s, t, eps) else {
            return Err(TestCaseError::reject("empty base"));
        };
        let outer = fibration_base(s, t * ratio, eps).unwrap();
        prop_assert!(outer.margin() <= inner.margin());
    }
}
