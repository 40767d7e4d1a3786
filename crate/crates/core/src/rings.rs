//! Sparse elements of the graded rings `B`, `MF` and `Gamma` in fixed
//! monomial bases, plus the indexed generator families A/B/C/D.
//!
//! `B` is spanned by `s^i t^j q2^eps` (`i, j` any integers, `eps` 0 or 1)
//! with the relation `q2^2 = (s + t)/2` applied eagerly, so normal forms are
//! unique and equality is coefficient-wise. `MF` is spanned by
//! `c4^n c6^eps Delta^l` with `c6^2 = c4^3 - 1728 Delta` eliminated.
//! `Gamma = B[r]/(r^3 + q2 r^2 + q4 r)` keeps the r-exponent at most 2.
//!
//! Degrees follow the halved internal grading throughout:
//! `deg s = deg t = 4`, `deg q2 = deg r = 2`, `deg c4 = 4`, `deg c6 = 6`,
//! `deg Delta = 12`. The doubled topological degree appears only in the
//! Greek-letter report.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Q2Error, Result};
use crate::local::Local3;

/// Monomial `s^s_exp t^t_exp q2^q2_exp` of `B`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct BMono {
    pub s: i64,
    pub t: i64,
    pub q2: u8,
}

impl BMono {
    pub fn degree(&self) -> i64 {
        4 * (self.s + self.t) + 2 * self.q2 as i64
    }
}

impl fmt::Display for BMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("s", self.s), ("t", self.t)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if self.q2 == 1 {
            parts.push("q2".into());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Monomial `c4^c4_exp c6^c6_exp Delta^delta_exp` of `MF`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct MfMono {
    pub c4: u32,
    pub c6: u8,
    pub delta: i64,
}

impl MfMono {
    pub fn degree(&self) -> i64 {
        4 * self.c4 as i64 + 6 * self.c6 as i64 + 12 * self.delta
    }

    /// The `m` of the enumeration `n + 3l + eps = m`.
    pub fn weight(&self) -> i64 {
        self.c4 as i64 + 3 * self.delta + self.c6 as i64
    }
}

impl fmt::Display for MfMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.c4 {
            0 => {}
            1 => parts.push("c4".to_string()),
            n => parts.push(format!("c4^{n}")),
        }
        if self.c6 == 1 {
            parts.push("c6".into());
        }
        match self.delta {
            0 => {}
            1 => parts.push("Delta".to_string()),
            l => parts.push(format!("Delta^{l}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Monomial `s^i t^j q2^eps r^k` of `Gamma`, with `k <= 2`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct GMono {
    pub s: i64,
    pub t: i64,
    pub q2: u8,
    pub r: u8,
}

impl GMono {
    pub fn degree(&self) -> i64 {
        4 * (self.s + self.t) + 2 * self.q2 as i64 + 2 * self.r as i64
    }
}

impl fmt::Display for GMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = BMono {
            s: self.s,
            t: self.t,
            q2: self.q2,
        };
        match (base == (BMono { s: 0, t: 0, q2: 0 }), self.r) {
            (_, 0) => write!(f, "{base}"),
            (true, 1) => write!(f, "r"),
            (true, k) => write!(f, "r^{k}"),
            (false, 1) => write!(f, "{base} r"),
            (false, k) => write!(f, "{base} r^{k}"),
        }
    }
}

/// Homogeneity verdict of [`t_degree`]-style queries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Homogeneity {
    /// The zero element (no terms).
    Zero,
    /// All terms share this degree.
    Degree(i64),
    /// Terms of mixed degrees; a marker, not a fault.
    NonHomogeneous,
}

impl Homogeneity {
    pub fn degree(self) -> Option<i64> {
        match self {
            Homogeneity::Degree(d) => Some(d),
            _ => None,
        }
    }
}

fn fold_degree<I: Iterator<Item = i64>>(mut degrees: I) -> Homogeneity {
    match degrees.next() {
        None => Homogeneity::Zero,
        Some(d) => {
            if degrees.all(|e| e == d) {
                Homogeneity::Degree(d)
            } else {
                Homogeneity::NonHomogeneous
            }
        }
    }
}

macro_rules! element_common {
    ($elt:ident, $mono:ident) => {
        impl $elt {
            pub fn zero() -> Self {
                Self {
                    terms: BTreeMap::new(),
                }
            }

            pub fn monomial(m: $mono, c: Local3) -> Self {
                let mut terms = BTreeMap::new();
                if !c.is_zero() {
                    terms.insert(m, c);
                }
                Self { terms }
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn terms(&self) -> impl Iterator<Item = (&$mono, &Local3)> {
                self.terms.iter()
            }

            pub fn num_terms(&self) -> usize {
                self.terms.len()
            }

            pub fn coeff(&self, m: &$mono) -> Local3 {
                self.terms.get(m).cloned().unwrap_or_else(Local3::zero)
            }

            fn accumulate(&mut self, m: $mono, c: Local3) {
                if c.is_zero() {
                    return;
                }
                use std::collections::btree_map::Entry;
                match self.terms.entry(m) {
                    Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    Entry::Occupied(mut e) => {
                        *e.get_mut() += &c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }

            pub fn add(&self, rhs: &Self) -> Self {
                let mut out = self.clone();
                for (m, c) in rhs.terms() {
                    out.accumulate(*m, c.clone());
                }
                out
            }

            pub fn sub(&self, rhs: &Self) -> Self {
                let mut out = self.clone();
                for (m, c) in rhs.terms() {
                    out.accumulate(*m, -c);
                }
                out
            }

            pub fn neg(&self) -> Self {
                Self {
                    terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
                }
            }

            pub fn scale(&self, c: &Local3) -> Self {
                if c.is_zero() {
                    return Self::zero();
                }
                Self {
                    terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
                }
            }

            pub fn t_degree(&self) -> Homogeneity {
                fold_degree(self.terms.keys().map(|m| m.degree()))
            }

            pub fn pow(&self, e: u32) -> Self {
                let mut out = Self::one();
                for _ in 0..e {
                    out = out.mul(self);
                }
                out
            }
        }
    };
}

/// Element of `B` as a finite `Z_(3)`-combination of `s^i t^j q2^eps`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BElement {
    terms: BTreeMap<BMono, Local3>,
}

element_common!(BElement, BMono);

impl BElement {
    pub fn one() -> Self {
        Self::monomial(BMono { s: 0, t: 0, q2: 0 }, Local3::one())
    }

    pub fn s_gen() -> Self {
        Self::monomial(BMono { s: 1, t: 0, q2: 0 }, Local3::one())
    }

    pub fn t_gen() -> Self {
        Self::monomial(BMono { s: 0, t: 1, q2: 0 }, Local3::one())
    }

    pub fn q2_gen() -> Self {
        Self::monomial(BMono { s: 0, t: 0, q2: 1 }, Local3::one())
    }

    /// `q4 = s/8` as a `B`-element.
    pub fn q4_gen() -> Self {
        Self::monomial(BMono { s: 1, t: 0, q2: 0 }, Local3::of(1, 8))
    }

    /// `mu = 8t` as a `B`-element.
    pub fn mu_gen() -> Self {
        Self::monomial(BMono { s: 0, t: 1, q2: 0 }, Local3::from_int(8))
    }

    /// Accumulates `c * s^i t^j q2^e` with arbitrary `e`, reducing
    /// `q2^2 = (s + t)/2`.
    fn accumulate_reduced(&mut self, s: i64, t: i64, q2e: u32, c: Local3) {
        if c.is_zero() {
            return;
        }
        if q2e <= 1 {
            self.accumulate(
                BMono {
                    s,
                    t,
                    q2: q2e as u8,
                },
                c,
            );
            return;
        }
        let half = Local3::of(1, 2);
        self.accumulate_reduced(s + 1, t, q2e - 2, &c * &half);
        self.accumulate_reduced(s, t + 1, q2e - 2, &c * &half);
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.accumulate_reduced(
                    m1.s + m2.s,
                    m1.t + m2.t,
                    m1.q2 as u32 + m2.q2 as u32,
                    c1 * c2,
                );
            }
        }
        out
    }

    /// Division by a single monomial term; anything else is rejected.
    pub fn div_monomial(&self, rhs: &Self) -> Result<Self> {
        if rhs.num_terms() != 1 {
            return Err(Q2Error::NonInvertibleDenominator(format!("{rhs}")));
        }
        let (m, c) = rhs.terms().next().unwrap();
        if m.q2 != 0 {
            // q2 is not invertible in B: q2^2 = (s+t)/2 is not a monomial
            return Err(Q2Error::NonInvertibleDenominator(format!("{rhs}")));
        }
        let cinv = c.inv().map_err(Q2Error::from)?;
        let inv = Self::monomial(
            BMono {
                s: -m.s,
                t: -m.t,
                q2: 0,
            },
            cinv,
        );
        Ok(self.mul(&inv))
    }

    /// Negative powers are defined for invertible monomials only.
    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        Self::one()
            .div_monomial(self)
            .map(|inv| inv.pow((-e) as u32))
    }
}

impl fmt::Display for BElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_terms(f, canonical_b_order(self).into_iter())
    }
}

/// Serialization order for `B`: lexicographic on `(i + j, i, eps)` with the
/// first index descending, matching the row enumeration `A_0, A_1, ...`.
pub fn canonical_b_order(x: &BElement) -> Vec<(BMono, Local3)> {
    let mut v: Vec<_> = x.terms().map(|(m, c)| (*m, c.clone())).collect();
    v.sort_by_key(|(m, _)| (m.s + m.t, std::cmp::Reverse(m.s), m.q2));
    v
}

/// Element of `MF` on the basis `c4^n c6^eps Delta^l`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MFElement {
    terms: BTreeMap<MfMono, Local3>,
}

element_common!(MFElement, MfMono);

impl MFElement {
    pub fn one() -> Self {
        Self::monomial(
            MfMono {
                c4: 0,
                c6: 0,
                delta: 0,
            },
            Local3::one(),
        )
    }

    pub fn c4_gen() -> Self {
        Self::monomial(
            MfMono {
                c4: 1,
                c6: 0,
                delta: 0,
            },
            Local3::one(),
        )
    }

    pub fn c6_gen() -> Self {
        Self::monomial(
            MfMono {
                c4: 0,
                c6: 1,
                delta: 0,
            },
            Local3::one(),
        )
    }

    pub fn delta_gen() -> Self {
        Self::monomial(
            MfMono {
                c4: 0,
                c6: 0,
                delta: 1,
            },
            Local3::one(),
        )
    }

    /// `j_MF^k = (c4^3 / Delta)^k` for `k >= 0`.
    pub fn j_pow(k: u32) -> Self {
        Self::monomial(
            MfMono {
                c4: 3 * k,
                c6: 0,
                delta: -(k as i64),
            },
            Local3::one(),
        )
    }

    fn accumulate_reduced(&mut self, c4: u32, c6e: u32, delta: i64, c: Local3) {
        if c.is_zero() {
            return;
        }
        if c6e <= 1 {
            self.accumulate(
                MfMono {
                    c4,
                    c6: c6e as u8,
                    delta,
                },
                c,
            );
            return;
        }
        // c6^2 = c4^3 - 1728 Delta
        self.accumulate_reduced(c4 + 3, c6e - 2, delta, c.clone());
        self.accumulate_reduced(c4, c6e - 2, delta + 1, &c * &Local3::from_int(-1728));
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.accumulate_reduced(
                    m1.c4 + m2.c4,
                    m1.c6 as u32 + m2.c6 as u32,
                    m1.delta + m2.delta,
                    c1 * c2,
                );
            }
        }
        out
    }
}

impl fmt::Display for MFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_terms(f, canonical_mf_order(self).into_iter())
    }
}

/// Serialization order for `MF`: by `(m, eps, v)` with `m = n + 3l + eps`
/// and `v` the column index (`l` descending), matching the C/D enumeration.
pub fn canonical_mf_order(x: &MFElement) -> Vec<(MfMono, Local3)> {
    let mut v: Vec<_> = x.terms().map(|(m, c)| (*m, c.clone())).collect();
    v.sort_by_key(|(m, _)| (m.weight(), m.c6, -m.delta));
    v
}

/// Element of `Gamma` on the basis `s^i t^j q2^eps r^k` with `k <= 2`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GammaElement {
    terms: BTreeMap<GMono, Local3>,
}

element_common!(GammaElement, GMono);

impl GammaElement {
    pub fn one() -> Self {
        Self::monomial(
            GMono {
                s: 0,
                t: 0,
                q2: 0,
                r: 0,
            },
            Local3::one(),
        )
    }

    pub fn r_gen() -> Self {
        Self::monomial(
            GMono {
                s: 0,
                t: 0,
                q2: 0,
                r: 1,
            },
            Local3::one(),
        )
    }

    pub fn from_b(x: &BElement) -> Self {
        Self {
            terms: x
                .terms()
                .map(|(m, c)| {
                    (
                        GMono {
                            s: m.s,
                            t: m.t,
                            q2: m.q2,
                            r: 0,
                        },
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// The `B`-part of an element with no `r` terms.
    pub fn to_b(&self) -> Option<BElement> {
        let mut out = BElement::zero();
        for (m, c) in self.terms() {
            if m.r != 0 {
                return None;
            }
            out.accumulate(
                BMono {
                    s: m.s,
                    t: m.t,
                    q2: m.q2,
                },
                c.clone(),
            );
        }
        Some(out)
    }

    /// Accumulates `c * s^i t^j q2^e r^k` with arbitrary `e, k`, reducing
    /// `q2^2 = (s + t)/2` and `r^3 = -q2 r^2 - q4 r` (`q4 = s/8`).
    fn accumulate_reduced(&mut self, s: i64, t: i64, q2e: u32, re: u32, c: Local3) {
        if c.is_zero() {
            return;
        }
        if q2e >= 2 {
            let half = Local3::of(1, 2);
            self.accumulate_reduced(s + 1, t, q2e - 2, re, &c * &half);
            self.accumulate_reduced(s, t + 1, q2e - 2, re, &c * &half);
            return;
        }
        if re >= 3 {
            self.accumulate_reduced(s, t, q2e + 1, re - 1, -&c);
            self.accumulate_reduced(s + 1, t, q2e, re - 2, &c * &Local3::of(-1, 8));
            return;
        }
        self.accumulate(
            GMono {
                s,
                t,
                q2: q2e as u8,
                r: re as u8,
            },
            c,
        );
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.accumulate_reduced(
                    m1.s + m2.s,
                    m1.t + m2.t,
                    m1.q2 as u32 + m2.q2 as u32,
                    m1.r as u32 + m2.r as u32,
                    c1 * c2,
                );
            }
        }
        out
    }

    pub fn mul_b(&self, rhs: &BElement) -> Self {
        self.mul(&Self::from_b(rhs))
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v: Vec<_> = self.terms().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by_key(|(m, _)| (m.s + m.t, m.s, m.q2, m.r));
        display_terms(f, v.into_iter())
    }
}

fn display_terms<M: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (M, Local3)>,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        write!(f, "({c})*{m}")?;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// `c4` in the `(s, t)` coordinates: `2s + 8t`.
pub fn c4_in_b() -> BElement {
    BElement::s_gen()
        .scale(&Local3::from_int(2))
        .add(&BElement::t_gen().scale(&Local3::from_int(8)))
}

/// `c6` in the `(s, t)` coordinates: `4 q2 (s - 8t)`.
pub fn c6_in_b() -> BElement {
    let inner = BElement::s_gen()
        .scale(&Local3::from_int(4))
        .add(&BElement::t_gen().scale(&Local3::from_int(-32)));
    BElement::q2_gen().mul(&inner)
}

/// `Delta = q4^2 mu = s^2 t / 8`.
pub fn delta_in_b() -> BElement {
    BElement::monomial(BMono { s: 2, t: 1, q2: 0 }, Local3::of(1, 8))
}

/// `Delta^l` for either sign of `l` (`Delta^-1 = 8 s^-2 t^-1`).
pub fn delta_pow_in_b(l: i64) -> BElement {
    if l >= 0 {
        BElement::monomial(
            BMono {
                s: 2 * l,
                t: l,
                q2: 0,
            },
            Local3::of(1, 8).pow(l as u32),
        )
    } else {
        BElement::monomial(
            BMono {
                s: 2 * l,
                t: l,
                q2: 0,
            },
            Local3::from_int(8).pow((-l) as u32),
        )
    }
}

thread_local! {
    // c4 powers dominate the expansion cost across block columns
    static C4_POWS: std::cell::RefCell<Vec<BElement>> =
        std::cell::RefCell::new(vec![BElement::one()]);
}

fn c4_pow_cached(n: usize) -> BElement {
    C4_POWS.with(|cell| {
        let mut pows = cell.borrow_mut();
        while pows.len() <= n {
            let next = pows.last().unwrap().mul(&c4_in_b());
            pows.push(next);
        }
        pows[n].clone()
    })
}

/// Expands an `MF` element in the `(s, t, q2)` basis of `B` by the
/// substitution `c4 = 2s + 8t`, `c6 = 4 q2 (s - 8t)`, `Delta = s^2 t / 8`.
pub fn mf_to_b(x: &MFElement) -> BElement {
    let mut out = BElement::zero();
    for (m, c) in x.terms() {
        let mut term = c4_pow_cached(m.c4 as usize).scale(c);
        if m.c6 == 1 {
            term = term.mul(&c6_in_b());
        }
        term = term.mul(&delta_pow_in_b(m.delta));
        out = out.add(&term);
    }
    out
}

/// A raw term in the presentation `q2, q4^{+-1}, mu^{+-1}, s^{+-1}, t^{+-1}`,
/// normalized into `B` via `q4 = s/8`, `mu = 8t`, `q2^2 = (s + t)/2`.
#[derive(Clone, Copy, Debug)]
pub struct RawBTerm {
    pub coeff_num: i64,
    pub coeff_den: i64,
    pub q2: u32,
    pub q4: i64,
    pub mu: i64,
    pub s: i64,
    pub t: i64,
}

impl Default for RawBTerm {
    fn default() -> Self {
        RawBTerm {
            coeff_num: 1,
            coeff_den: 1,
            q2: 0,
            q4: 0,
            mu: 0,
            s: 0,
            t: 0,
        }
    }
}

/// Canonical form of a sum of raw terms.
pub fn normalize_b(raw: &[RawBTerm]) -> Result<BElement> {
    let mut out = BElement::zero();
    for term in raw {
        if term.coeff_den % 3 == 0 {
            return Err(Q2Error::NonInvertibleDenominator(format!(
                "coefficient {}/{}",
                term.coeff_num, term.coeff_den
            )));
        }
        // q4^a mu^b = (s/8)^a (8t)^b = 8^(b-a) s^a t^b
        let mut c = Local3::of(term.coeff_num, term.coeff_den);
        let eight = Local3::from_int(8);
        let shift = term.mu - term.q4;
        c = if shift >= 0 {
            &c * &eight.pow(shift as u32)
        } else {
            c.try_div(&eight.pow((-shift) as u32))
                .map_err(Q2Error::from)?
        };
        let mut elt = BElement::zero();
        elt.accumulate_reduced(term.s + term.q4, term.t + term.mu, term.q2, c);
        out = out.add(&elt);
    }
    Ok(out)
}

/// The generator families indexing eigenvectors and `MF` basis columns:
/// `A_v^m = a_{floor((m-1)/2)-v, ceil((m+1)/2)+v}`, `B_v^m` its `q2`
/// counterpart, `C_v^m = c4^{m-3*l0+3v} Delta^{l0-v}`,
/// `D_v^m = c4^{m-3*l1-1+3v} c6 Delta^{l1-v}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        };
        write!(f, "{c}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct GeneratorIndex {
    pub family: Family,
    pub m: i64,
    pub v: i64,
}

/// `floor(m/3)`: the largest `Delta`-exponent in the `eps = 0` column basis.
pub fn l0(m: i64) -> i64 {
    m.div_euclid(3)
}

/// `floor((m-1)/3)`: its `eps = 1` counterpart.
pub fn l1(m: i64) -> i64 {
    (m - 1).div_euclid(3)
}

/// Eigenvector row index `(i, j)` for `A_v^m` / `B_v^m`.
pub fn ab_indices(m: i64, v: i64) -> (i64, i64) {
    ((m - 1).div_euclid(2) - v, (m + 2).div_euclid(2) + v)
}

/// `a_{i,j} = s^i t^j - s^j t^i`.
pub fn a_elt(i: i64, j: i64) -> BElement {
    BElement::monomial(BMono { s: i, t: j, q2: 0 }, Local3::one()).add(&BElement::monomial(
        BMono { s: j, t: i, q2: 0 },
        Local3::from_int(-1),
    ))
}

/// `abar_{i,j} = s^i t^j + s^j t^i`.
pub fn abar_elt(i: i64, j: i64) -> BElement {
    BElement::monomial(BMono { s: i, t: j, q2: 0 }, Local3::one()).add(&BElement::monomial(
        BMono { s: j, t: i, q2: 0 },
        Local3::one(),
    ))
}

/// `b_{i,j} = a_{i,j} q2`.
pub fn b_elt(i: i64, j: i64) -> BElement {
    a_elt(i, j).mul(&BElement::q2_gen())
}

/// `bbar_{i,j} = abar_{i,j} q2`.
pub fn bbar_elt(i: i64, j: i64) -> BElement {
    abar_elt(i, j).mul(&BElement::q2_gen())
}

/// `c_i^eps = s^i t^i q2^eps`.
pub fn c_diag_elt(i: i64, eps: u8) -> BElement {
    BElement::monomial(
        BMono {
            s: i,
            t: i,
            q2: eps,
        },
        Local3::one(),
    )
}

/// Either side of the generator-to-element conversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenElement {
    B(BElement),
    Mf(MFElement),
}

impl GeneratorIndex {
    pub fn new(family: Family, m: i64, v: i64) -> Result<Self> {
        let g = GeneratorIndex { family, m, v };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.v < 0 {
            return Err(Q2Error::InvalidIndex(format!(
                "{self}: v must be non-negative"
            )));
        }
        match self.family {
            Family::A | Family::B => Ok(()),
            Family::C => {
                let n = self.m - 3 * l0(self.m) + 3 * self.v;
                if n < 0 {
                    Err(Q2Error::InvalidIndex(format!(
                        "{self}: c4 exponent {n} negative"
                    )))
                } else {
                    Ok(())
                }
            }
            Family::D => {
                let n = self.m - 3 * l1(self.m) - 1 + 3 * self.v;
                if n < 0 {
                    Err(Q2Error::InvalidIndex(format!(
                        "{self}: c4 exponent {n} negative"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Internal degree: `4m` for A/C, `4m + 2` for B/D.
    pub fn t_degree(&self) -> i64 {
        match self.family {
            Family::A | Family::C => 4 * self.m,
            Family::B | Family::D => 4 * self.m + 2,
        }
    }

    pub fn to_element(&self) -> Result<GenElement> {
        self.validate()?;
        Ok(match self.family {
            Family::A => {
                let (i, j) = ab_indices(self.m, self.v);
                GenElement::B(a_elt(i, j))
            }
            Family::B => {
                let (i, j) = ab_indices(self.m, self.v);
                GenElement::B(b_elt(i, j))
            }
            Family::C => {
                let n = (self.m - 3 * l0(self.m) + 3 * self.v) as u32;
                GenElement::Mf(MFElement::monomial(
                    MfMono {
                        c4: n,
                        c6: 0,
                        delta: l0(self.m) - self.v,
                    },
                    Local3::one(),
                ))
            }
            Family::D => {
                let n = (self.m - 3 * l1(self.m) - 1 + 3 * self.v) as u32;
                GenElement::Mf(MFElement::monomial(
                    MfMono {
                        c4: n,
                        c6: 1,
                        delta: l1(self.m) - self.v,
                    },
                    Local3::one(),
                ))
            }
        })
    }
}

impl fmt::Display for GeneratorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.family, self.m, self.v)
    }
}

/// Labels for matrix rows/columns and presentation generators.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum GenLabel {
    /// A/B/C/D generator.
    Gen(Family, i64, i64),
    /// `j_MF^k`.
    JPow(i64),
    /// `a_{-i,i}`, the free kernel-of-h family.
    KerH(i64),
    /// The unit of `MF`.
    OneMf,
    /// `Delta^k alpha` (`alpha` itself when `k = 0`).
    Alpha(i64),
    /// Symbolic cohomology summand of the elliptic curve Hopf algebroid.
    Ext { s: i64, t: i64 },
}

impl GenLabel {
    pub fn gen(f: Family, m: i64, v: i64) -> Self {
        GenLabel::Gen(f, m, v)
    }
}

impl fmt::Display for GenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenLabel::Gen(fam, m, v) => write!(f, "{fam}[{m},{v}]"),
            GenLabel::JPow(k) => write!(f, "j^{k}"),
            GenLabel::KerH(i) => write!(f, "a[-{i},{i}]"),
            GenLabel::OneMf => write!(f, "1"),
            GenLabel::Alpha(0) => write!(f, "alpha"),
            GenLabel::Alpha(k) => write!(f, "Delta^{k}*alpha"),
            GenLabel::Ext { s, t } => write!(f, "Ext^({s},{t})"),
        }
    }
}

/// JSON value for an element: array of `{"monomial": ..., "coeff": "p/q"}`.
pub fn b_to_json(x: &BElement) -> serde_json::Value {
    serde_json::Value::Array(
        canonical_b_order(x)
            .into_iter()
            .map(|(m, c)| {
                serde_json::json!({ "monomial": m.to_string(), "coeff": coeff_string(&c) })
            })
            .collect(),
    )
}

pub fn mf_to_json(x: &MFElement) -> serde_json::Value {
    serde_json::Value::Array(
        canonical_mf_order(x)
            .into_iter()
            .map(|(m, c)| {
                serde_json::json!({ "monomial": m.to_string(), "coeff": coeff_string(&c) })
            })
            .collect(),
    )
}

fn coeff_string(c: &Local3) -> String {
    if c.denom() == &num::BigInt::from(1) {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}
