use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use kecollapse_core::degeneration::{
    dual_complex, mumford_degeneration, verify_duality, PolyDecomposition,
};

const FIXTURES: [&str; 4] = [
    include_str!("../fixtures/square_diagonal.txt"),
    include_str!("../fixtures/trivial.txt"),
    include_str!("../fixtures/two_by_two.txt"),
    include_str!("../fixtures/interval.txt"),
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn affine_change_of_psi_keeps_the_complex(
        k in 0usize..4,
        w in prop::collection::vec(-6i64..=6, 2),
        c in -10i64..=10,
    ) {
        let pd = PolyDecomposition::parse(FIXTURES[k]).unwrap();
        let w = &w[..pd.dim()];
        let shifted = pd.sheared(w, &BigRational::from_integer(BigInt::from(c)));
        let d0 = mumford_degeneration(&pd).unwrap();
        let d1 = mumford_degeneration(&shifted).unwrap();
        prop_assert_eq!(d0.components(), d1.components());
        let s0: Vec<_> = d0.strata().iter().map(|s| (s.components.clone(), s.face.clone())).collect();
        let s1: Vec<_> = d1.strata().iter().map(|s| (s.components.clone(), s.face.clone())).collect();
        prop_assert_eq!(s0, s1);
        let (a, b) = (dual_complex(&d0).unwrap(), dual_complex(&d1).unwrap());
        prop_assert_eq!(&a.faces, &b.faces);
        prop_assert_eq!(a.f_vector(), b.f_vector());
        prop_assert!(verify_duality(&b, &d1).pass());
    }
}

#[test]
fn counts_and_local_gorenstein_condition() {
    for text in FIXTURES {
        let pd = PolyDecomposition::parse(text).unwrap();
        let d = mumford_degeneration(&pd).unwrap();
        let dc = dual_complex(&d).unwrap();
        let n = d.dim();
        assert_eq!(dc.f_vector()[0], pd.cells().len());
        for k in 0..dc.f_vector().len() {
            let strata = d.strata().iter().filter(|s| s.dim() == n - k).count();
            assert_eq!(dc.f_vector()[k], strata);
        }
        for s in d.strata() {
            assert!(s.gorenstein.is_integral());
            for r in s.cone.rays() {
                assert!(s.gorenstein.pair(r).is_one());
            }
        }
        for c in &dc.cells {
            let s = d
                .strata()
                .iter()
                .find(|s| s.components == c.components)
                .unwrap();
            assert_eq!(c.dim + s.dim(), n);
        }
        let r = verify_duality(&dc, &d);
        assert!(r.pass());
        assert_eq!(r.pairs_checked, dc.cells.len() * (dc.cells.len() - 1));
    }
}
