//! Classes in `coker h` and `coker g`, and the kernel bases of `g` and `h`.
//!
//! `coker h` is a free family `a_{-i,i}` (`i >= 1`) in degree 0 plus cyclic
//! summands `Z/3^{val3(i+j)+1}` on `a_{i,j}` and `Z/3^{val3(2i+2j+1)+1}` on
//! `b_{i,j}` for `i < j`; the `abar`, `bbar` and diagonal coordinates die
//! because their `h`-eigenvalues are units. `coker g` has the degree-0
//! `j`-powers free plus `Z/3^{val3(deg)+1}` per nonzero-degree basis
//! monomial.

use std::collections::BTreeMap;

use crate::local::{Local3, Residue};
use crate::rings::{a_elt, BElement, MFElement, MfMono};

/// Exact (pre-reduction) coordinates of a `B`-element on the `a`/`b`
/// eigenfamilies: coefficient of `a_{i,j}` (resp. `b_{i,j}`) with `i < j`
/// is `(c_{i,j} - c_{j,i})/2` by the folding identities
/// `s^i t^j = (a_{i,j} + abar_{i,j})/2`, `a_{j,i} = -a_{i,j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoldedB {
    pub a: BTreeMap<(i64, i64), Local3>,
    pub b: BTreeMap<(i64, i64), Local3>,
}

pub fn fold_eigencoords(x: &BElement) -> FoldedB {
    let mut out = FoldedB::default();
    for (m, c) in x.terms() {
        if m.s == m.t {
            continue; // diagonal classes are unit eigenvectors, dropped
        }
        let (lo, hi) = (m.s.min(m.t), m.s.max(m.t));
        let signed = if m.s == lo { c.clone() } else { -c };
        let half = &signed * &Local3::of(1, 2);
        let slot = if m.q2 == 0 { &mut out.a } else { &mut out.b };
        let entry = slot.entry((lo, hi)).or_insert_with(Local3::zero);
        *entry += &half;
        if entry.is_zero() {
            slot.remove(&(lo, hi));
        }
    }
    out
}

/// A class in `coker h`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CokerHClass {
    /// Coefficients on the free generators `a_{-i,i}`, keyed by `i >= 1`.
    pub free: BTreeMap<i64, Local3>,
    /// Torsion `a_{i,j}` coordinates (`i < j`, `i + j != 0`), reduced mod
    /// `3^{val3(i+j)+1}`.
    pub a_tors: BTreeMap<(i64, i64), Residue>,
    /// Torsion `b_{i,j}` coordinates, reduced mod `3^{val3(2i+2j+1)+1}`.
    pub b_tors: BTreeMap<(i64, i64), Residue>,
}

impl CokerHClass {
    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.a_tors.is_empty() && self.b_tors.is_empty()
    }
}

pub fn a_order_exp(i: i64, j: i64) -> Option<u32> {
    crate::local::val3_bigint(&num::BigInt::from(i + j)).order_exp()
}

pub fn b_order_exp(i: i64, j: i64) -> u32 {
    crate::local::val3_bigint(&num::BigInt::from(2 * i + 2 * j + 1))
        .order_exp()
        .expect("2i+2j+1 is odd, never zero")
}

/// Projection `B -> coker h` in the eigencoordinates.
pub fn project_coker_h(x: &BElement) -> CokerHClass {
    let folded = fold_eigencoords(x);
    let mut out = CokerHClass::default();
    for ((i, j), c) in folded.a {
        match a_order_exp(i, j) {
            None => {
                // i + j = 0: the h-eigenvalue vanishes and a_{i,-i} is free
                if !c.is_zero() {
                    out.free.insert(j, c);
                }
            }
            Some(e) => {
                let r = c.reduce_mod(e);
                if !r.is_zero() {
                    out.a_tors.insert((i, j), r);
                }
            }
        }
    }
    for ((i, j), c) in folded.b {
        let r = c.reduce_mod(b_order_exp(i, j));
        if !r.is_zero() {
            out.b_tors.insert((i, j), r);
        }
    }
    out
}

/// A class in `coker g`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CokerGClass {
    /// Coefficients on the free generators `j_MF^k`, keyed by `k >= 0`.
    pub free: BTreeMap<i64, Local3>,
    /// Torsion coordinates per nonzero-degree basis monomial, reduced mod
    /// `3^{val3(deg)+1}`.
    pub tors: BTreeMap<MfMono, Residue>,
}

impl CokerGClass {
    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.tors.is_empty()
    }
}

/// Projection `MF -> coker g`, basis-monomial-wise.
pub fn project_coker_g(x: &MFElement) -> CokerGClass {
    let mut out = CokerGClass::default();
    for (m, c) in x.terms() {
        let deg = m.degree();
        if deg == 0 {
            // degree-0 monomials are exactly the j-powers c4^{3k} Delta^{-k}
            debug_assert_eq!(m.c6, 0);
            debug_assert_eq!(m.c4 as i64, -3 * m.delta);
            if !c.is_zero() {
                out.free.insert(-m.delta, c.clone());
            }
        } else {
            let e = crate::local::val3_bigint(&num::BigInt::from(deg))
                .order_exp()
                .expect("nonzero degree");
            let r = c.reduce_mod(e);
            if !r.is_zero() {
                out.tors.insert(*m, r);
            }
        }
    }
    out
}

/// Basis element `j_MF^k` of `ker g = Z_(3)[j_MF]`.
pub fn ker_g_element(k: u32) -> MFElement {
    MFElement::j_pow(k)
}

/// Basis element `a_{-i,i}` of `ker h`, for `i >= 1`.
pub fn ker_h_element(i: i64) -> BElement {
    assert!(i >= 1, "ker h basis is indexed by i >= 1");
    a_elt(-i, i)
}

/// Exact coefficients of an element of `ker h` on the basis `a_{-v,v}`,
/// with the antisymmetry of the support asserted.
pub fn ker_h_coordinates(x: &BElement) -> BTreeMap<i64, Local3> {
    let mut out = BTreeMap::new();
    for (m, c) in x.terms() {
        assert_eq!(m.q2, 0, "ker h elements carry no q2");
        assert_eq!(m.s + m.t, 0, "ker h elements are supported on i + j = 0");
        if m.s < m.t {
            out.insert(m.t, c.clone());
        }
    }
    for (m, c) in x.terms() {
        if m.s > m.t {
            let mirror = out.get(&m.s).cloned().unwrap_or_else(Local3::zero);
            assert_eq!(mirror, -c, "antisymmetric support required");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{g_map, h_map};
    use crate::local::Val3;
    use crate::rings::{abar_elt, mf_to_b, BMono, Family, GenElement, GeneratorIndex};
    use rand::{Rng, SeedableRng};

    #[test]
    fn projection_examples() {
        // s t^2 = a_{1,2}/2 -> 5 a_{1,2} mod 9
        let x = BElement::monomial(BMono { s: 1, t: 2, q2: 0 }, Local3::one());
        let cls = project_coker_h(&x);
        assert_eq!(cls.a_tors[&(1, 2)], Residue::new(5, 2));
        // abar_{1,2} projects to zero
        assert!(project_coker_h(&abar_elt(1, 2)).is_zero());
        // a_{-1,1} lands in the free part with coefficient 1
        let cls = project_coker_h(&a_elt(-1, 1));
        assert_eq!(cls.free[&1], Local3::one());
        assert!(cls.a_tors.is_empty());
        // diagonal monomials are discarded
        let diag = BElement::monomial(BMono { s: 2, t: 2, q2: 1 }, Local3::one());
        assert!(project_coker_h(&diag).is_zero());
    }

    #[test]
    fn coker_g_examples() {
        // 15 c4 dies: the order of c4 is 3^{val3(4)+1} = 3
        let x = MFElement::c4_gen().scale(&Local3::from_int(15));
        assert!(project_coker_g(&x).is_zero());
        // c6 survives mod 9
        let cls = project_coker_g(&MFElement::c6_gen());
        let m = MfMono {
            c4: 0,
            c6: 1,
            delta: 0,
        };
        assert_eq!(cls.tors[&m], Residue::new(1, 2));
        // j^2 is free with coefficient 1
        let cls = project_coker_g(&MFElement::j_pow(2));
        assert_eq!(cls.free[&2], Local3::one());
        assert!(cls.tors.is_empty());
    }

    #[test]
    fn kernel_elements() {
        assert_eq!(ker_g_element(0), MFElement::one());
        let j = ker_g_element(1);
        let (m, _) = j.terms().next().unwrap();
        assert_eq!((m.c4, m.c6, m.delta), (3, 0, -1));
        assert_eq!(ker_h_element(2), a_elt(-2, 2));
        assert!(h_map(&ker_h_element(2)).is_zero());
        assert!(g_map(&ker_g_element(3)).is_zero());
    }

    fn random_homogeneous_b(rng: &mut impl Rng, eps: u8, m: i64) -> BElement {
        let mut x = BElement::zero();
        for _ in 0..rng.gen_range(1..5) {
            let i = rng.gen_range(-6..=6);
            let c = Local3::of(rng.gen_range(-40..40), [1, 2, 4][rng.gen_range(0..3)]);
            x = x.add(&BElement::monomial(
                BMono {
                    s: i,
                    t: m - i,
                    q2: eps,
                },
                c,
            ));
        }
        x
    }

    #[test]
    fn coker_property_h() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let eps = rng.gen_range(0..=1u8);
            let m = rng.gen_range(-8..=8i64);
            let x = random_homogeneous_b(&mut rng, eps, m);
            assert!(project_coker_h(&h_map(&x)).is_zero());
        }
    }

    #[test]
    fn coker_property_g() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..300 {
            let n = rng.gen_range(0..6u32);
            let eps = rng.gen_range(0..=1u8);
            let l = rng.gen_range(-3..=3i64);
            let x = MFElement::monomial(
                MfMono {
                    c4: n,
                    c6: eps,
                    delta: l,
                },
                Local3::of(rng.gen_range(-50..50).max(1), 2),
            );
            assert!(project_coker_g(&g_map(&x)).is_zero());
        }
    }

    #[test]
    fn projection_is_additive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let eps = rng.gen_range(0..=1u8);
            let m = rng.gen_range(-5..=5i64);
            let x = random_homogeneous_b(&mut rng, eps, m);
            let y = random_homogeneous_b(&mut rng, eps, m);
            let lhs = project_coker_h(&x.add(&y));
            let rhs = {
                // componentwise sum of the two projections
                let a = project_coker_h(&x);
                let b = project_coker_h(&y);
                let mut free = a.free.clone();
                for (k, c) in b.free {
                    let e = free.entry(k).or_insert_with(Local3::zero);
                    *e += &c;
                    if e.is_zero() {
                        free.remove(&k);
                    }
                }
                let mut a_tors = a.a_tors.clone();
                for (k, r) in b.a_tors {
                    let cur = a_tors
                        .remove(&k)
                        .unwrap_or(Residue::new(0, r.modulus_exp()));
                    let sum = cur.add(r);
                    if !sum.is_zero() {
                        a_tors.insert(k, sum);
                    }
                }
                let mut b_tors = a.b_tors.clone();
                for (k, r) in b.b_tors {
                    let cur = b_tors
                        .remove(&k)
                        .unwrap_or(Residue::new(0, r.modulus_exp()));
                    let sum = cur.add(r);
                    if !sum.is_zero() {
                        b_tors.insert(k, sum);
                    }
                }
                CokerHClass {
                    free,
                    a_tors,
                    b_tors,
                }
            };
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn generator_orders_swept() {
        // multiplying a generator by its stated order kills it, 3^{e-1} does not
        for i in -10i64..=10 {
            for j in (i + 1)..=10 {
                if i + j != 0 {
                    let e = a_order_exp(i, j).unwrap();
                    let big = a_elt(i, j).scale(&Local3::from_int(3).pow(e));
                    assert!(project_coker_h(&big).is_zero(), "a[{i},{j}]");
                    let small = a_elt(i, j).scale(&Local3::from_int(3).pow(e - 1));
                    assert!(!project_coker_h(&small).is_zero(), "a[{i},{j}]");
                }
                let e = b_order_exp(i, j);
                let big = crate::rings::b_elt(i, j).scale(&Local3::from_int(3).pow(e));
                assert!(project_coker_h(&big).is_zero(), "b[{i},{j}]");
                let small = crate::rings::b_elt(i, j).scale(&Local3::from_int(3).pow(e - 1));
                assert!(!project_coker_h(&small).is_zero(), "b[{i},{j}]");
            }
        }
    }

    #[test]
    fn ker_h_coordinate_extraction() {
        let x = a_elt(-1, 1)
            .scale(&Local3::of(5, 2))
            .add(&a_elt(-3, 3).scale(&Local3::from_int(-7)));
        let coords = ker_h_coordinates(&x);
        assert_eq!(coords[&1], Local3::of(5, 2));
        assert_eq!(coords[&3], Local3::from_int(-7));
        assert_eq!(coords.len(), 2);
    }

    #[test]
    fn delta1_of_c4n_vanishes_small() {
        // the projected class of -c4^n is zero in coker h
        for n in 1..=12u32 {
            let x = mf_to_b(&MFElement::c4_gen().pow(n)).neg();
            assert!(project_coker_h(&x).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn order_exp_conventions() {
        assert_eq!(a_order_exp(-2, 2), None);
        assert_eq!(a_order_exp(1, 2), Some(2));
        assert_eq!(b_order_exp(6, 7), 4);
        assert_eq!(Val3::Infinity.order_exp(), None);
    }

    #[test]
    fn generator_index_degree_match() {
        for v in 0..5 {
            let g = GeneratorIndex::new(Family::D, 13, v).unwrap();
            if let GenElement::Mf(x) = g.to_element().unwrap() {
                assert_eq!(x.t_degree().degree(), Some(54));
            }
        }
    }
}
