use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Inv, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::text::parse_rational;
use crate::prime_field::{FpElement, Prime};

/// Contract for a coefficient field: zero, one, add, negate, multiply,
/// invert-nonzero, equality. The descriptor value owns any context the
/// elements need (such as the prime of `F_p`).
pub trait CoeffField: Clone + PartialEq + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;

    fn descriptor(&self) -> FieldDescriptor;
    fn format_elem(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value;
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// First `n` coefficients of the Cauchy product of `a` and `b`.
    fn convolve(&self, a: &[Self::Elem], b: &[Self::Elem], n: usize) -> Vec<Self::Elem> {
        let mut out = vec![self.zero(); n];
        for (i, x) in a.iter().take(n).enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().take(n - i).enumerate() {
                if !self.is_zero(y) {
                    out[i + j] = self.add(&out[i + j], &self.mul(x, y));
                }
            }
        }
        out
    }

    /// `true` when the canonical text of `a` starts with a minus sign.
    fn is_negative_text(&self, a: &Self::Elem) -> bool {
        self.format_elem(a).starts_with('-')
    }
}

/// Serialized field tag: `{"Fp":3}` or `"Q"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldDescriptor {
    Fp(u64),
    Q,
}

/// `F_p` as a coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: Prime,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        Ok(PrimeField { p: Prime::new(p)? })
    }

    pub fn from_prime(p: Prime) -> Self {
        PrimeField { p }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }
}

impl CoeffField for PrimeField {
    type Elem = FpElement;

    fn zero(&self) -> FpElement {
        FpElement::zero(self.p)
    }

    fn one(&self) -> FpElement {
        FpElement::one(self.p)
    }

    fn add(&self, a: &FpElement, b: &FpElement) -> FpElement {
        a.add_unchecked(*b)
    }

    fn neg(&self, a: &FpElement) -> FpElement {
        a.neg()
    }

    fn mul(&self, a: &FpElement, b: &FpElement) -> FpElement {
        a.mul_unchecked(*b)
    }

    fn inv(&self, a: &FpElement) -> Option<FpElement> {
        a.inv().ok()
    }

    fn from_i64(&self, n: i64) -> FpElement {
        FpElement::new(self.p, n)
    }

    fn characteristic(&self) -> u64 {
        self.p.get()
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Fp(self.p.get())
    }

    fn format_elem(&self, a: &FpElement) -> String {
        a.value().to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<FpElement> {
        let n: BigInt = s.trim().parse().map_err(|_| Error::parse(format!("expected an integer, got {s:?}")))?;
        Ok(FpElement::from_big(self.p, &n))
    }

    fn elem_to_json(&self, a: &FpElement) -> serde_json::Value {
        serde_json::Value::from(a.value())
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<FpElement> {
        let n = v.as_u64().ok_or_else(|| Error::parse(format!("expected a residue, got {v}")))?;
        if n >= self.p.get() {
            return Err(Error::parse(format!("{n} is not reduced modulo {}", self.p)));
        }
        Ok(FpElement::new(self.p, n as i64))
    }
}

/// The exact rationals as a coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl CoeffField for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.clone().inv())
        }
    }

    /// Clears denominators so the inner loop is integer arithmetic, with one
    /// reduction per output coefficient.
    fn convolve(&self, a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
        let (a, da) = over_common_denominator(&a[..a.len().min(n)]);
        let (b, db) = over_common_denominator(&b[..b.len().min(n)]);
        let mut out = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().take(n - i).enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        let d = da * db;
        out.into_iter().map(|c| BigRational::new(c, d.clone())).collect()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor::Q
    }

    fn format_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        let (a, b) = parse_rational(s)?;
        Ok(BigRational::new(a, b))
    }

    fn elem_to_json(&self, a: &BigRational) -> serde_json::Value {
        serde_json::Value::from(a.to_string())
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<BigRational> {
        match v {
            serde_json::Value::String(s) => self.parse_elem(s),
            serde_json::Value::Number(n) if n.is_i64() => Ok(self.from_i64(n.as_i64().unwrap_or_default())),
            _ => Err(Error::parse(format!("expected a rational, got {v}"))),
        }
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Integers `c_i` and `d > 0` with `q_i = c_i / d`.
fn over_common_denominator(qs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let d = qs.iter().fold(BigInt::one(), |d, q| num_integer::Integer::lcm(&d, q.denom()));
    let cs = qs.iter().map(|q| q.numer() * (&d / q.denom())).collect();
    (cs, d)
}
