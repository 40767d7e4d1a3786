//! Exact arithmetic over the 3-local integers `Z_(3)` and residue
//! arithmetic modulo powers of 3.
//!
//! `Z_(3)` is the subring of `Q` of fractions whose denominator is coprime
//! to 3; it is a local PID with maximal ideal (3). Every nonzero element is
//! `3^v * u` with `u` a unit, and `v = val3` is the 3-adic valuation.

use num::{BigInt, BigRational, One, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::ArithError;

/// A 3-adic valuation: a natural number, or infinity for the zero element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val3 {
    Finite(u32),
    Infinity,
}

impl Val3 {
    pub fn finite(self) -> Option<u32> {
        match self {
            Val3::Finite(v) => Some(v),
            Val3::Infinity => None,
        }
    }

    /// The cyclic-order exponent `val + 1`, with infinity mapping to a free
    /// summand downstream.
    pub fn order_exp(self) -> Option<u32> {
        self.finite().map(|v| v + 1)
    }
}

impl PartialOrd for Val3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val3 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val3::Infinity, Val3::Infinity) => Ordering::Equal,
            (Val3::Infinity, _) => Ordering::Greater,
            (_, Val3::Infinity) => Ordering::Less,
            (Val3::Finite(a), Val3::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Val3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val3::Finite(v) => write!(f, "{v}"),
            Val3::Infinity => write!(f, "inf"),
        }
    }
}

/// 3-adic valuation of an arbitrary-precision integer.
pub fn val3_bigint(n: &BigInt) -> Val3 {
    if n.is_zero() {
        return Val3::Infinity;
    }
    let three = BigInt::from(3);
    let mut n = n.clone();
    let mut v = 0u32;
    loop {
        let (q, r) = num::Integer::div_rem(&n, &three);
        if !r.is_zero() {
            return Val3::Finite(v);
        }
        n = q;
        v += 1;
    }
}

/// An exact 3-local rational: numerator over a positive denominator coprime
/// to 3, always in lowest terms. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Local3(BigRational);

impl Local3 {
    /// Builds `num/den`, rejecting inputs outside `Z_(3)`.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::NonIntegralInput("zero denominator".into()));
        }
        let r = BigRational::new(num, den);
        if (r.denom() % BigInt::from(3)).is_zero() {
            return Err(ArithError::NonIntegralInput(format!(
                "denominator {} is divisible by 3",
                r.denom()
            )));
        }
        Ok(Local3(r))
    }

    /// Convenience constructor for literals; panics on non-3-local input.
    pub fn of(num: i64, den: i64) -> Self {
        Self::new(BigInt::from(num), BigInt::from(den)).expect("3-local literal")
    }

    pub fn from_int(n: i64) -> Self {
        Local3(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Local3(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Local3(BigRational::zero())
    }

    pub fn one() -> Self {
        Local3(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// `2^e` for any integer `e`; the result stays in `Z_(3)`.
    pub fn two_pow(e: i64) -> Self {
        let two = BigInt::from(2);
        if e >= 0 {
            Local3(BigRational::from_integer(two.pow(e as u32)))
        } else {
            Local3(BigRational::new(BigInt::one(), two.pow((-e) as u32)))
        }
    }

    /// 3-adic valuation; the denominator contributes 0 by the ring invariant.
    pub fn val3(&self) -> Val3 {
        val3_bigint(self.0.numer())
    }

    /// True iff nonzero of valuation 0, i.e. invertible in `Z_(3)`.
    pub fn is_unit(&self) -> bool {
        self.val3() == Val3::Finite(0)
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        if !self.is_unit() {
            return Err(ArithError::NonInvertible(format!("{self}")));
        }
        Ok(Local3(self.0.recip()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Local3(num::traits::Pow::pow(&self.0, e))
    }

    /// Division, defined when the divisor is a unit of `Z_(3)`.
    pub fn try_div(&self, rhs: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Exact division by `3^e`, defined when `val3(self) >= e`.
    pub fn div_exact_pow3(&self, e: u32) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        match self.val3() {
            Val3::Finite(v) if v >= e => {
                let p = BigInt::from(3).pow(e);
                Ok(Local3(BigRational::new(
                    self.0.numer() / p,
                    self.0.denom().clone(),
                )))
            }
            _ => Err(ArithError::NonIntegralInput(format!("{self} / 3^{e}"))),
        }
    }

    /// Residue mod `3^k`; total on `Z_(3)` since the denominator is a unit.
    pub fn reduce_mod(&self, k: u32) -> Residue {
        let m = BigInt::from(3).pow(k);
        let num = self.0.numer().mod_floor_big(&m);
        let den_inv = mod_inverse(&self.0.denom().mod_floor_big(&m), &m)
            .expect("denominator coprime to 3 by the Local3 invariant");
        let value = (num * den_inv).mod_floor_big(&m);
        Residue::new(big_to_u64(&value), k)
    }
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        num::Integer::mod_floor(self, m)
    }
}

fn big_to_u64(n: &BigInt) -> u64 {
    use num::ToPrimitive;
    n.to_u64()
        .expect("residue fits in u64 (modulus exponent <= 36)")
}

/// Extended-Euclid inverse of `a` mod `m`, when `gcd(a, m) = 1`.
fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = num::Integer::extended_gcd(a, m);
    if e.gcd.is_one() {
        Some(num::Integer::mod_floor(&e.x, m))
    } else {
        None
    }
}

impl fmt::Display for Local3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Local3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Local3 {
            type Output = Local3;
            fn $m(self, rhs: Local3) -> Local3 {
                Local3(self.0 $op rhs.0)
            }
        }
        impl $tr<&Local3> for &Local3 {
            type Output = Local3;
            fn $m(self, rhs: &Local3) -> Local3 {
                Local3(&self.0 $op &rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl AddAssign<&Local3> for Local3 {
    fn add_assign(&mut self, rhs: &Local3) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Local3> for Local3 {
    fn sub_assign(&mut self, rhs: &Local3) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Local3> for Local3 {
    fn mul_assign(&mut self, rhs: &Local3) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Local3 {
    type Output = Local3;
    fn neg(self) -> Local3 {
        Local3(-self.0)
    }
}

impl Neg for &Local3 {
    type Output = Local3;
    fn neg(self) -> Local3 {
        Local3(-&self.0)
    }
}

/// A residue mod `3^K`, reduced to `[0, 3^K)`. Arithmetic requires equal
/// modulus exponents.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus_exp: u32,
}

impl Residue {
    pub fn new(value: u64, modulus_exp: u32) -> Self {
        assert!(
            modulus_exp >= 1 && modulus_exp <= 36,
            "modulus exponent out of range"
        );
        let m = 3u64.pow(modulus_exp);
        Residue {
            value: value % m,
            modulus_exp,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus_exp(&self) -> u32 {
        self.modulus_exp
    }

    pub fn modulus(&self) -> u64 {
        3u64.pow(self.modulus_exp)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(self, rhs: Self) -> Self {
        assert_eq!(
            self.modulus_exp, rhs.modulus_exp,
            "residue arithmetic requires equal modulus exponents"
        );
        rhs
    }

    pub fn add(self, rhs: Self) -> Self {
        let rhs = self.check(rhs);
        Residue::new(
            self.value.wrapping_add(rhs.value) % self.modulus(),
            self.modulus_exp,
        )
    }

    pub fn sub(self, rhs: Self) -> Self {
        let rhs = self.check(rhs);
        let m = self.modulus();
        Residue::new((self.value + m - rhs.value) % m, self.modulus_exp)
    }

    pub fn mul(self, rhs: Self) -> Self {
        let rhs = self.check(rhs);
        let m = self.modulus() as u128;
        Residue::new(
            ((self.value as u128 * rhs.value as u128) % m) as u64,
            self.modulus_exp,
        )
    }

    /// Valuation of the residue, capped at the modulus exponent.
    pub fn val3(&self) -> u32 {
        if self.value == 0 {
            return self.modulus_exp;
        }
        let mut v = 0;
        let mut x = self.value;
        while x % 3 == 0 {
            x /= 3;
            v += 1;
        }
        v
    }

    pub fn inv(self) -> Result<Self, ArithError> {
        if self.val3() > 0 {
            return Err(ArithError::NonInvertible(format!(
                "{} mod 3^{}",
                self.value, self.modulus_exp
            )));
        }
        let m = BigInt::from(self.modulus());
        let inv = mod_inverse(&BigInt::from(self.value), &m).expect("unit residue");
        Ok(Residue::new(big_to_u64(&inv), self.modulus_exp))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod 3^{}", self.value, self.modulus_exp)
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The 3-divisibility lemma behind every torsion order in this crate:
/// for even nonzero `n`, `val3(4^n - 1) = val3(n) + 1`; for odd `n`,
/// `val3(2^n + 1) = val3(n) + 1`. Negative exponents go through fractions.
pub fn adic_lemma_check(n: i64) -> bool {
    assert!(n != 0, "adic lemma is about nonzero integers");
    let vn = match val3_bigint(&BigInt::from(n)) {
        Val3::Finite(v) => v,
        Val3::Infinity => unreachable!(),
    };
    let lhs = if n % 2 == 0 {
        let four_n = Local3::two_pow(2 * n);
        (four_n - Local3::one()).val3()
    } else {
        (Local3::two_pow(n) + Local3::one()).val3()
    };
    lhs == Val3::Finite(vn + 1)
}
