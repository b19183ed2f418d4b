//! The prime field `F_p`: coefficient field for formal series and residue
//! field of `Z_p`.
//!
//! Every element carries its prime, so mixing fields is a checked error.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Trial division is run up to this bound; larger factors are trusted.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    /// Checks `p >= 2` and trial-divides by every `d <= min(sqrt p, 10^6)`.
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d <= TRIAL_DIVISION_LIMIT && d.saturating_mul(d) <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as a big integer.
    pub fn pow(self, e: u32) -> BigInt {
        num_traits::pow(self.big(), e as usize)
    }

    pub(crate) fn check_same(self, other: Prime) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.0, other.0))
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Extended Euclid on signed 128-bit integers: returns `(g, s, t)` with
/// `s*a + t*b = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m` for big integers, `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Exponent of `p` in a nonzero integer, and the cofactor.
pub fn split_p_power(n: &BigInt, p: Prime) -> (u32, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = p.big();
    let mut k = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        m = q;
        k += 1;
    }
    (k, m)
}

/// `v_p(n)` for a nonzero machine integer.
pub fn p_valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// `floor(log_p j)` for `j >= 1`.
pub fn floor_log(j: u64, p: u64) -> u32 {
    debug_assert!(j >= 1);
    let mut k = 0;
    let mut acc = p as u128;
    while acc <= j as u128 {
        acc *= p as u128;
        k += 1;
    }
    k
}

/// An element of `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElement {
    p: Prime,
    value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpOp {
    Add,
    Sub,
    Mul,
}

impl FpElement {
    pub fn new(p: Prime, value: i64) -> Self {
        let m = p.get() as i128;
        FpElement { p, value: (value as i128).rem_euclid(m) as u64 }
    }

    pub fn from_big(p: Prime, value: &BigInt) -> Self {
        let r = value.mod_floor(&p.big());
        let value = r.to_string().parse::<u64>().expect("residue fits in u64");
        FpElement { p, value }
    }

    pub fn zero(p: Prime) -> Self {
        FpElement { p, value: 0 }
    }

    pub fn one(p: Prime) -> Self {
        FpElement { p, value: 1 % p.get() }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn arith(op: FpOp, a: FpElement, b: FpElement) -> Result<FpElement> {
        match op {
            FpOp::Add => a.add(b),
            FpOp::Sub => a.sub(b),
            FpOp::Mul => a.mul(b),
        }
    }

    pub fn add(self, other: FpElement) -> Result<FpElement> {
        self.p.check_same(other.p)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(self, other: FpElement) -> Result<FpElement> {
        self.p.check_same(other.p)?;
        Ok(self.add_unchecked(other.neg()))
    }

    pub fn mul(self, other: FpElement) -> Result<FpElement> {
        self.p.check_same(other.p)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn neg(self) -> FpElement {
        let p = self.p.get();
        FpElement { p: self.p, value: (p - self.value) % p }
    }

    pub(crate) fn add_unchecked(self, other: FpElement) -> FpElement {
        let p = self.p.get() as u128;
        let v = (self.value as u128 + other.value as u128) % p;
        FpElement { p: self.p, value: v as u64 }
    }

    pub(crate) fn mul_unchecked(self, other: FpElement) -> FpElement {
        let p = self.p.get() as u128;
        let v = (self.value as u128 * other.value as u128) % p;
        FpElement { p: self.p, value: v as u64 }
    }

    /// Multiplicative inverse through extended gcd.
    pub fn inv(self) -> Result<FpElement> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        let (g, s, _) = ext_gcd(self.value as i128, self.p.get() as i128);
        if g != 1 {
            return Err(Error::NotPrime(self.p.get()));
        }
        let v = s.rem_euclid(self.p.get() as i128);
        Ok(FpElement { p: self.p, value: v as u64 })
    }

    pub fn pow(self, mut e: u64) -> FpElement {
        let mut base = self;
        let mut acc = FpElement::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            e >>= 1;
        }
        acc
    }

    pub fn to_big(self) -> BigInt {
        BigInt::from(self.value)
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, v: i64) -> FpElement {
        FpElement::new(Prime::new(p).unwrap(), v)
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(7).is_ok());
        assert!(Prime::new(1_000_003).is_ok());
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(Error::NotPrime(91)));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(fp(5, 3).add(fp(5, 4)).unwrap().value(), 2);
        assert_eq!(fp(5, 3).mul(fp(5, 4)).unwrap().value(), 2);
        assert_eq!(fp(7, 0).sub(fp(7, 1)).unwrap().value(), 6);
        assert_eq!(FpElement::arith(FpOp::Mul, fp(5, 3), fp(5, 4)).unwrap().value(), 2);
    }

    #[test]
    fn mismatched_primes_rejected() {
        assert_eq!(fp(5, 1).add(fp(7, 1)), Err(Error::PrimeMismatch(5, 7)));
        assert!(fp(5, 1).mul(fp(3, 1)).is_err());
    }

    #[test]
    fn inverse_examples() {
        // exhaustive search for 3c = 1 mod 7
        let c = (0..7).find(|c| (3 * c) % 7 == 1).unwrap();
        assert_eq!(fp(7, 3).inv().unwrap().value(), c as u64);
        assert_eq!(c, 5);
        for p in [2u64, 3, 5, 7, 11, 101] {
            assert_eq!(fp(p, 1).inv().unwrap().value(), 1);
            assert_eq!(fp(p, p as i64 - 1).inv().unwrap().value(), p - 1);
        }
        assert_eq!(fp(7, 0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn pow_examples() {
        assert_eq!(fp(5, 2).pow(3).value(), 3);
        assert_eq!(fp(3, 2).pow(3).value(), fp(3, 1).add(fp(3, 1)).unwrap().value());
        assert_eq!(fp(13, 9).pow(0).value(), 1);
        for p in [3u64, 5, 7, 11, 13] {
            for a in 1..p {
                assert_eq!(fp(p, a as i64).pow(p - 1).value(), 1, "Fermat at p={p}, a={a}");
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_primes() {
        for p in [2u64, 3, 5, 7] {
            let all: Vec<_> = (0..p as i64).map(|v| fp(p, v)).collect();
            for &a in &all {
                if !a.is_zero() {
                    assert_eq!(a.mul(a.inv().unwrap()).unwrap().value(), 1);
                }
                for &b in &all {
                    assert_eq!(a.add(b), b.add(a));
                    assert_eq!(a.mul(b), b.mul(a));
                    // Frobenius additivity
                    assert_eq!(a.add(b).unwrap().pow(p), a.pow(p).add(b.pow(p)).unwrap());
                    for &c in &all {
                        assert_eq!(a.add(b).unwrap().add(c), a.add(b.add(c).unwrap()));
                        assert_eq!(a.mul(b).unwrap().mul(c), a.mul(b.mul(c).unwrap()));
                        assert_eq!(
                            a.mul(b.add(c).unwrap()).unwrap(),
                            a.mul(b).unwrap().add(a.mul(c).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn helpers() {
        assert_eq!(ext_gcd(240, 46).0, 2);
        let inv = mod_inverse(&BigInt::from(2), &BigInt::from(625)).unwrap();
        assert_eq!(inv, BigInt::from(313));
        assert_eq!(floor_log(1, 5), 0);
        assert_eq!(floor_log(4, 5), 0);
        assert_eq!(floor_log(5, 5), 1);
        assert_eq!(floor_log(124, 5), 2);
        assert_eq!(floor_log(125, 5), 3);
        assert_eq!(p_valuation_u64(48, 2), 4);
        let p = Prime::new(3).unwrap();
        assert_eq!(split_p_power(&BigInt::from(-54), p), (3, BigInt::from(-2)));
    }
}
