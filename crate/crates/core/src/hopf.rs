//! The ring maps of the double complex: `psi_d`, `phi_f`, `phi_q`,
//! `psi_[2]`, the filtration self-maps `g` and `h`, the degree-0 cobar
//! differential, and the assembled pair maps `Phi`, `Psi`.
//!
//! On generators: `psi_d: q2 -> -2 q2, q4 -> q2^2 - 4 q4`;
//! `phi_f: q2 -> q2, q4 -> q4, r -> 0`; `phi_q = psi_d . phi_f`;
//! `psi_[2]: q2 -> 4 q2, q4 -> 16 q4, r -> 4r`. In the `(s, t)` basis
//! `psi_d` swaps `s` and `t` up to the factor `4^{i+j} (-2)^eps`, which is
//! what makes the `a/b` elements an eigenbasis for `h = psi_d + 1`.

use crate::local::Local3;
use crate::rings::{BElement, BMono, GMono, GammaElement, MFElement};

/// `psi_d` on `B`: `s^i t^j q2^eps -> 4^{i+j} (-2)^eps s^j t^i q2^eps`.
pub fn psi_d(x: &BElement) -> BElement {
    let mut out = BElement::zero();
    for (m, c) in x.terms() {
        let factor = &Local3::two_pow(2 * (m.s + m.t))
            * &(if m.q2 == 1 {
                Local3::from_int(-2)
            } else {
                Local3::one()
            });
        out = out.add(&BElement::monomial(
            BMono {
                s: m.t,
                t: m.s,
                q2: m.q2,
            },
            &c.clone() * &factor,
        ));
    }
    out
}

/// `phi_f` on `Gamma`: kills every `r`-multiple, identity on the rest.
pub fn phi_f(x: &GammaElement) -> BElement {
    let mut out = BElement::zero();
    for (m, c) in x.terms() {
        if m.r == 0 {
            out = out.add(&BElement::monomial(
                BMono {
                    s: m.s,
                    t: m.t,
                    q2: m.q2,
                },
                c.clone(),
            ));
        }
    }
    out
}

/// `phi_q = psi_d . phi_f`.
pub fn phi_q(x: &GammaElement) -> BElement {
    psi_d(&phi_f(x))
}

/// `psi_[2]` on `Gamma`: multiplies a degree-`d` monomial by `2^d`.
pub fn psi_2(x: &GammaElement) -> GammaElement {
    let mut out = GammaElement::zero();
    for (m, c) in x.terms() {
        out = out.add(&GammaElement::monomial(
            *m,
            &c.clone() * &Local3::two_pow(m.degree()),
        ));
    }
    out
}

/// `psi_[2]` restricted to `B`.
pub fn psi_2_b(x: &BElement) -> BElement {
    let mut out = BElement::zero();
    for (m, c) in x.terms() {
        out = out.add(&BElement::monomial(
            *m,
            &c.clone() * &Local3::two_pow(m.degree()),
        ));
    }
    out
}

/// `g = psi_[2] - 1` on `MF`: each degree-`d` basis term picks up `2^d - 1`.
pub fn g_map(x: &MFElement) -> MFElement {
    let mut out = MFElement::zero();
    for (m, c) in x.terms() {
        let factor = Local3::two_pow(m.degree()) - Local3::one();
        out = out.add(&MFElement::monomial(*m, &c.clone() * &factor));
    }
    out
}

/// `h = psi_d + 1` on `B`.
pub fn h_map(x: &BElement) -> BElement {
    psi_d(x).add(x)
}

/// `Phi(x) = (psi_[2](x) - x, phi_q(x) - phi_f(x))`, first component on the
/// `Gamma` side, second on the `B` side.
pub fn phi_pair(x: &GammaElement) -> (GammaElement, BElement) {
    (psi_2(x).sub(x), phi_q(x).sub(&phi_f(x)))
}

/// `Psi(x, y) = psi_d(y) - phi_f(x) + y`.
pub fn psi_pair(x: &GammaElement, y: &BElement) -> BElement {
    psi_d(y).sub(&phi_f(x)).add(y)
}

/// Right-unit images of the `B`-generators in `Gamma`, from the coordinate
/// change `x -> x + r` on the Weierstrass form:
/// `q2 -> q2 + 3r`, `q4 -> q4 + 2 q2 r + 3 r^2`, hence
/// `s -> s + 16 q2 r + 24 r^2` and `t -> t - 4 q2 r - 6 r^2`.
fn eta_r_s() -> GammaElement {
    gamma_terms(&[(1, 0, 0, 0, 1, 1), (0, 0, 1, 1, 16, 1), (0, 0, 0, 2, 24, 1)])
}

fn eta_r_t() -> GammaElement {
    gamma_terms(&[(0, 1, 0, 0, 1, 1), (0, 0, 1, 1, -4, 1), (0, 0, 0, 2, -6, 1)])
}

fn eta_r_q2() -> GammaElement {
    gamma_terms(&[(0, 0, 1, 0, 1, 1), (0, 0, 0, 1, 3, 1)])
}

/// Inverse of `eta_R(s)` in `Gamma`, valid because the `r`-part is
/// annihilated against the relation ideal:
/// `s^-1 (1 + (2 q2 t^-1 + 16 q2 s^-1) r + (4 t^-1 + 16 s^-1) r^2)`.
fn eta_r_s_inv() -> GammaElement {
    gamma_terms(&[
        (-1, 0, 0, 0, 1, 1),
        (-1, -1, 1, 1, 2, 1),
        (-2, 0, 1, 1, 16, 1),
        (-1, -1, 0, 2, 4, 1),
        (-2, 0, 0, 2, 16, 1),
    ])
}

/// Inverse of `eta_R(t)`:
/// `t^-1 (1 + 8 q2 s^-1 r + (8 s^-1 + 32 t s^-2) r^2)`.
fn eta_r_t_inv() -> GammaElement {
    gamma_terms(&[
        (0, -1, 0, 0, 1, 1),
        (-1, -1, 1, 1, 8, 1),
        (-1, -1, 0, 2, 8, 1),
        (-2, 0, 0, 2, 32, 1),
    ])
}

fn gamma_terms(terms: &[(i64, i64, u8, u8, i64, i64)]) -> GammaElement {
    let mut out = GammaElement::zero();
    for &(s, t, q2, r, num, den) in terms {
        out = out.add(&GammaElement::monomial(
            GMono { s, t, q2, r },
            Local3::of(num, den),
        ));
    }
    out
}

/// The right unit `eta_R: B -> Gamma`, evaluated monomial by monomial with
/// per-call caches for the generator powers.
pub fn eta_r(x: &BElement) -> GammaElement {
    let mut cache = EtaCache::new();
    let mut out = GammaElement::zero();
    for (m, c) in x.terms() {
        let img = cache.monomial_image(m);
        out = out.add(&img.scale(c));
    }
    out
}

struct EtaCache {
    s_pos: Vec<GammaElement>,
    s_neg: Vec<GammaElement>,
    t_pos: Vec<GammaElement>,
    t_neg: Vec<GammaElement>,
}

impl EtaCache {
    fn new() -> Self {
        EtaCache {
            s_pos: vec![GammaElement::one()],
            s_neg: vec![GammaElement::one()],
            t_pos: vec![GammaElement::one()],
            t_neg: vec![GammaElement::one()],
        }
    }

    fn power(table: &mut Vec<GammaElement>, base: &GammaElement, e: usize) -> GammaElement {
        while table.len() <= e {
            let next = table.last().unwrap().mul(base);
            table.push(next);
        }
        table[e].clone()
    }

    fn monomial_image(&mut self, m: &BMono) -> GammaElement {
        let s_part = if m.s >= 0 {
            Self::power(&mut self.s_pos, &eta_r_s(), m.s as usize)
        } else {
            Self::power(&mut self.s_neg, &eta_r_s_inv(), (-m.s) as usize)
        };
        let t_part = if m.t >= 0 {
            Self::power(&mut self.t_pos, &eta_r_t(), m.t as usize)
        } else {
            Self::power(&mut self.t_neg, &eta_r_t_inv(), (-m.t) as usize)
        };
        let mut img = s_part.mul(&t_part);
        if m.q2 == 1 {
            img = img.mul(&eta_r_q2());
        }
        img
    }
}

/// Degree-0 cobar differential `d(x) = eta_R(x) - x`; it vanishes exactly on
/// the ring of invariants `MF`.
pub fn cobar_d0(x: &BElement) -> GammaElement {
    eta_r(x).sub(&GammaElement::from_b(x))
}

/// A Hopf-algebroid map given by its generator images, used to cross-check
/// the closed-form maps above. Source generators are `q2`, `q4` and
/// (optionally) `r`; evaluation is multiplicative by construction.
pub struct RingMapSpec {
    pub q2_image: GammaElement,
    pub q4_image: GammaElement,
    pub r_image: Option<GammaElement>,
}

impl RingMapSpec {
    pub fn psi_d_spec() -> Self {
        // q2 -> -2 q2; q4 -> q2^2 - 4 q4
        let q2 = GammaElement::from_b(&BElement::q2_gen());
        let q4 = GammaElement::from_b(&BElement::q4_gen());
        RingMapSpec {
            q2_image: q2.scale(&Local3::from_int(-2)),
            q4_image: q2.mul(&q2).sub(&q4.scale(&Local3::from_int(4))),
            r_image: None,
        }
    }

    pub fn psi_2_spec() -> Self {
        let q2 = GammaElement::from_b(&BElement::q2_gen());
        let q4 = GammaElement::from_b(&BElement::q4_gen());
        RingMapSpec {
            q2_image: q2.scale(&Local3::from_int(4)),
            q4_image: q4.scale(&Local3::from_int(16)),
            r_image: Some(GammaElement::r_gen().scale(&Local3::from_int(4))),
        }
    }

    ///`s = 8 q4`, `t = (16 q2^2 - 64 q4)/8` in terms of the images.
    fn st_images(&self) -> (GammaElement, GammaElement) {
        let s = self.q4_image.scale(&Local3::from_int(8));
        let t = self
            .q2_image
            .mul(&self.q2_image)
            .scale(&Local3::from_int(16))
            .sub(&self.q4_image.scale(&Local3::from_int(64)))
            .scale(&Local3::of(1, 8));
        (s, t)
    }

    /// Evaluates on an element with non-negative `s, t` exponents.
    pub fn eval_nonneg(&self, x: &GammaElement) -> GammaElement {
        let (s_img, t_img) = self.st_images();
        let mut out = GammaElement::zero();
        for (m, c) in x.terms() {
            assert!(m.s >= 0 && m.t >= 0, "eval_nonneg: negative exponent");
            let mut term = s_img.pow(m.s as u32).mul(&t_img.pow(m.t as u32));
            if m.q2 == 1 {
                term = term.mul(&self.q2_image);
            }
            for _ in 0..m.r {
                let r_img = self.r_image.as_ref().expect("map with r image");
                term = term.mul(r_img);
            }
            out = out.add(&term.scale(c));
        }
        out
    }
}
