//! Property tests for the arithmetic layers: valuation rules, the residue
//! homomorphism, map multiplicativity and the Smith-form oracle.

use proptest::prelude::*;

use q2_core::hopf::{phi_f, phi_q, psi_2_b, psi_d};
use q2_core::local::{Local3, Val3};
use q2_core::rings::{BElement, BMono, Family, GammaElement, GenLabel};
use q2_core::snf::{brute_force_oracle, snf_cardinalities, LocalMatrix, SummandOrder};

fn local3() -> impl Strategy<Value = Local3> {
    (
        any::<i32>(),
        prop_oneof![Just(1i64), Just(2), Just(4), Just(5), Just(8)],
    )
        .prop_map(|(n, d)| Local3::of(n as i64, d))
}

fn b_mono() -> impl Strategy<Value = BMono> {
    (-5i64..=5, -5i64..=5, 0u8..=1).prop_map(|(s, t, q2)| BMono { s, t, q2 })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn valuation_of_products_adds(x in local3(), y in local3()) {
        let vxy = (&x * &y).val3();
        match (x.val3(), y.val3()) {
            (Val3::Finite(a), Val3::Finite(b)) => prop_assert_eq!(vxy, Val3::Finite(a + b)),
            _ => prop_assert_eq!(vxy, Val3::Infinity),
        }
    }

    #[test]
    fn valuation_of_sums_bounded(x in local3(), y in local3()) {
        let v = (&x + &y).val3();
        prop_assert!(v >= x.val3().min(y.val3()));
        if x.val3() != y.val3() {
            prop_assert_eq!(v, x.val3().min(y.val3()));
        }
    }

    #[test]
    fn reduce_mod_is_multiplicative(x in local3(), y in local3(), k in 1u32..6) {
        prop_assert_eq!((&x * &y).reduce_mod(k), x.reduce_mod(k).mul(y.reduce_mod(k)));
        prop_assert_eq!((&x + &y).reduce_mod(k), x.reduce_mod(k).add(y.reduce_mod(k)));
    }

    #[test]
    fn ring_maps_are_multiplicative(m1 in b_mono(), m2 in b_mono(), c in local3()) {
        let x = BElement::monomial(m1, Local3::of(3, 2));
        let y = BElement::monomial(m2, c);
        let xy = x.mul(&y);
        prop_assert_eq!(psi_d(&xy), psi_d(&x).mul(&psi_d(&y)));
        prop_assert_eq!(psi_2_b(&xy), psi_2_b(&x).mul(&psi_2_b(&y)));
        let gx = GammaElement::from_b(&x);
        let gy = GammaElement::from_b(&y);
        prop_assert_eq!(phi_q(&gx.mul(&gy)), psi_d(&phi_f(&gx).mul(&phi_f(&gy))));
    }

    #[test]
    fn snf_sizes_match_oracle(
        rows in 1usize..4,
        cols in 1usize..4,
        k in 1u32..4,
        data in proptest::collection::vec(-30i64..30, 9),
    ) {
        let mut m = LocalMatrix::new(
            rows,
            cols,
            vec![SummandOrder::Tors(k); rows],
            (0..rows).map(|i| GenLabel::Gen(Family::B, 0, i as i64)).collect(),
            (0..cols).map(|j| GenLabel::Gen(Family::D, 0, j as i64)).collect(),
        );
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, Local3::from_int(data[i * 3 + j]));
            }
        }
        let (kern, coker) = brute_force_oracle(&m, k).unwrap();
        let (ke, ce) = snf_cardinalities(&m, k);
        prop_assert_eq!(3u64.pow(ke as u32), kern);
        prop_assert_eq!(3u64.pow(ce as u32), coker);
    }
}
