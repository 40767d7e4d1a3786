//! Independent oracle for the degree-wise cokernel of `Psi`: quotient the
//! raw monomial coordinates of a degree slice of `B` by the columns of `h`
//! on monomials together with the expanded `MF` basis elements, with no
//! eigenbasis, folding or block machinery involved, and compare the group
//! size against the survivor count predicted by the leading-term analysis
//! (the same prediction the block pipeline is tested against).

use q2_core::connecting::{block_order_exp, leading_term_expected, LeadingTerm};
use q2_core::hopf::h_map;
use q2_core::local::Local3;
use q2_core::rings::{mf_to_b, BElement, BMono, Family, GenElement, GenLabel, GeneratorIndex};
use q2_core::snf::{snf_cardinalities, LocalMatrix, SummandOrder};

/// Builds the slice matrix at weight `m`, parity `eps`, with monomial rows
/// `s^i t^(m-i) q2^eps` for `i` in `[m - n, n]` and columns `h(monomial)`
/// plus the first `v_max` expanded basis columns; returns the 3-exponent of
/// the quotient size.
fn direct_quotient_exp(eps: u8, m: i64, n: i64, v_max: i64, k: u32) -> u64 {
    let i_range: Vec<i64> = (m - n..=n).collect();
    let index_of = |i: i64| (i - (m - n)) as usize;
    let rows = i_range.len();
    let mut cols: Vec<BElement> = Vec::new();
    for &i in &i_range {
        let mono = BElement::monomial(BMono { s: i, t: m - i, q2: eps }, Local3::one());
        cols.push(h_map(&mono));
    }
    for v in 0..v_max {
        let fam = if eps == 0 { Family::C } else { Family::D };
        let g = GeneratorIndex::new(fam, m, v).unwrap();
        let GenElement::Mf(x) = g.to_element().unwrap() else { unreachable!() };
        cols.push(mf_to_b(&x));
    }
    let mut matrix = LocalMatrix::new(
        rows,
        cols.len(),
        vec![SummandOrder::Tors(k); rows],
        (0..rows).map(|w| GenLabel::Gen(Family::A, m, w as i64)).collect(),
        (0..cols.len()).map(|j| GenLabel::Gen(Family::C, m, j as i64)).collect(),
    );
    for (j, col) in cols.iter().enumerate() {
        for (mono, c) in col.terms() {
            assert_eq!(mono.q2, eps);
            assert_eq!(mono.s + mono.t, m);
            assert!(
                mono.s >= m - n && mono.s <= n,
                "column {j} leaves the monomial window"
            );
            matrix.set(index_of(mono.s), j, c.clone());
        }
    }
    let (_, coker_exp) = snf_cardinalities(&matrix, k);
    coker_exp
}

/// Survivor count predicted by the leading-term analysis, restricted to
/// the eigenclass rows visible in the monomial window.
fn predicted_survivors(eps: u8, m: i64, n: i64, v_max: i64) -> u64 {
    let fl = (m - 1).div_euclid(2);
    // eigenclass rows w = 0 .. fl - (m - n)
    let w_count = fl - m + n + 1;
    let mut eliminated = 0;
    for v in 0..v_max {
        if let LeadingTerm::Row(w) = leading_term_expected(eps, m, v) {
            if (w as i64) < w_count {
                eliminated += 1;
            }
        }
    }
    (w_count - eliminated) as u64
}

fn check(eps: u8, m: i64, n: i64, v_max: i64) {
    let e = block_order_exp(eps, m);
    let k = e + 2;
    let got = direct_quotient_exp(eps, m, n, v_max, k);
    let expect = e as u64 * predicted_survivors(eps, m, n, v_max);
    assert_eq!(got, expect, "eps={eps} m={m}: quotient size 3^{got} vs predicted 3^{expect}");
}

#[test]
fn weight_one_slices() {
    // t = 4: cyclic orders 3; t = 6: cyclic orders 9
    check(0, 1, 12, 5);
    check(1, 1, 12, 5);
}

#[test]
fn negative_weight_slices() {
    check(0, -2, 12, 5);
    check(1, -2, 12, 5);
    check(1, -4, 12, 4);
}

#[test]
fn higher_torsion_slices() {
    // val3(2*4+1) + 1 = 3: order-27 families at weight 4
    check(1, 4, 14, 5);
    check(0, 9, 14, 4);
}
