//! Truncated-precision arithmetic in `Q_p` and `Z_p`.
//!
//! A nonzero value is stored as `p^v * m + O(p^(v + r))` with `m` a unit
//! modulo `p^r`. The absolute value `|x|_p = p^(-v)` is never materialized;
//! valuations are the only representation of size, compared in reverse.
//! A value all of whose known digits vanish is *zero to precision* and only
//! carries its absolute precision `N`, meaning "valuation >= N".
//!
//! Precision bookkeeping follows the usual interval rules:
//!
//! ```text
//! (p^a u + O(p^M)) + (p^b w + O(p^N)) = ... + O(p^min(M, N))
//! (p^a u + O(p^(a+r))) (p^b w + O(p^(b+s))) = p^(a+b) u w + O(p^(a+b+min(r, s)))
//! ```
//!
//! so relative precision never grows under multiplication. The precision cap
//! bounds what constructors may request.

mod residue;
pub(crate) mod text;

use std::cmp::min;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ext::Valuation;
use crate::prime_field::{mod_inverse, split_p_power, Prime};

pub use residue::ResidueClass;
pub use text::PadicJson;
pub(crate) use text::parse_rational;

/// Environment variable overriding the default precision cap.
pub const PREC_CAP_ENV: &str = "PADICORE_PREC_CAP";

/// Upper bound on relative precision (in base-`p` digits) of constructed values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrecisionCap(u32);

impl PrecisionCap {
    pub const DEFAULT: PrecisionCap = PrecisionCap(64);

    pub fn new(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::domain("precision cap must be at least 1"));
        }
        Ok(PrecisionCap(digits))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Reads `PADICORE_PREC_CAP`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PREC_CAP_ENV) {
            Ok(s) => {
                let d: u32 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("{PREC_CAP_ENV}={s:?} is not a digit count")))?;
                PrecisionCap::new(d)
            }
            Err(_) => Ok(PrecisionCap::DEFAULT),
        }
    }
}

impl Default for PrecisionCap {
    fn default() -> Self {
        PrecisionCap::DEFAULT
    }
}

/// Construction context: a prime and a precision cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qp {
    p: Prime,
    cap: PrecisionCap,
}

impl Qp {
    pub fn new(p: u64) -> Result<Self> {
        Ok(Qp { p: Prime::new(p)?, cap: PrecisionCap::DEFAULT })
    }

    pub fn from_prime(p: Prime) -> Self {
        Qp { p, cap: PrecisionCap::DEFAULT }
    }

    pub fn with_cap(self, cap: PrecisionCap) -> Self {
        Qp { cap, ..self }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn cap(&self) -> PrecisionCap {
        self.cap
    }

    /// `a/b + O(p^abs_prec)`.
    pub fn rational(&self, a: impl Into<BigInt>, b: impl Into<BigInt>, abs_prec: i64) -> Result<PadicNumber> {
        let (a, b) = (a.into(), b.into());
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if a.is_zero() {
            return Ok(PadicNumber::zero(self.p, abs_prec));
        }
        let (va, ua) = split_p_power(&a, self.p);
        let (vb, ub) = split_p_power(&b, self.p);
        let v = va as i64 - vb as i64;
        if abs_prec <= v {
            return Ok(PadicNumber::zero(self.p, abs_prec));
        }
        let r = abs_prec - v;
        self.check_cap(r)?;
        let modulus = self.p.pow(r as u32);
        let inv = mod_inverse(&ub, &modulus).ok_or_else(|| Error::Internal("unit without inverse".into()))?;
        let unit = (ua * inv).mod_floor(&modulus);
        Ok(PadicNumber { p: self.p, kind: Kind::Nonzero { valuation: v, unit, rel_prec: r as u32 } })
    }

    pub fn integer(&self, n: impl Into<BigInt>, abs_prec: i64) -> Result<PadicNumber> {
        self.rational(n, 1, abs_prec)
    }

    pub fn big_rational(&self, q: &BigRational, abs_prec: i64) -> Result<PadicNumber> {
        self.rational(q.numer().clone(), q.denom().clone(), abs_prec)
    }

    pub fn zero(&self, abs_prec: i64) -> PadicNumber {
        PadicNumber::zero(self.p, abs_prec)
    }

    pub fn one(&self, abs_prec: i64) -> Result<PadicNumber> {
        self.integer(1, abs_prec)
    }

    /// `p^valuation * mantissa + O(p^abs_prec)` for an arbitrary integer mantissa.
    pub fn from_parts(&self, valuation: i64, mantissa: &BigInt, abs_prec: i64) -> Result<PadicNumber> {
        let x = PadicNumber::normalize(self.p, valuation, mantissa, abs_prec);
        if let Some(r) = x.rel_prec() {
            self.check_cap(r as i64)?;
        }
        Ok(x)
    }

    fn check_cap(&self, r: i64) -> Result<()> {
        if r > self.cap.0 as i64 {
            Err(Error::PrecisionCapExceeded { requested: r, cap: self.cap.0 })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Kind {
    Zero { abs_prec: i64 },
    Nonzero { valuation: i64, unit: BigInt, rel_prec: u32 },
}

/// A p-adic number known modulo `p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: Prime,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicOp {
    Add,
    Sub,
    Mul,
}

impl PadicNumber {
    /// `a/b` to absolute precision `abs_prec` under the default precision cap.
    pub fn from_rational(a: impl Into<BigInt>, b: impl Into<BigInt>, p: Prime, abs_prec: i64) -> Result<Self> {
        Qp::from_prime(p).rational(a, b, abs_prec)
    }

    pub fn zero(p: Prime, abs_prec: i64) -> Self {
        PadicNumber { p, kind: Kind::Zero { abs_prec } }
    }

    /// Normalizing constructor without a cap check.
    pub(crate) fn normalize(p: Prime, valuation: i64, mantissa: &BigInt, abs_prec: i64) -> Self {
        if mantissa.is_zero() || abs_prec <= valuation {
            return PadicNumber::zero(p, abs_prec);
        }
        let (k, m) = split_p_power(mantissa, p);
        let v = valuation + k as i64;
        if abs_prec <= v {
            return PadicNumber::zero(p, abs_prec);
        }
        let r = (abs_prec - v) as u32;
        let unit = m.mod_floor(&p.pow(r));
        PadicNumber { p, kind: Kind::Nonzero { valuation: v, unit, rel_prec: r } }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero { .. })
    }

    pub fn valuation(&self) -> Valuation {
        match &self.kind {
            Kind::Zero { abs_prec } => Valuation::AtLeast(*abs_prec),
            Kind::Nonzero { valuation, .. } => Valuation::Exact(*valuation),
        }
    }

    /// Valuation when known exactly.
    pub fn exact_valuation(&self) -> Option<i64> {
        self.valuation().exact()
    }

    pub fn abs_prec(&self) -> i64 {
        match &self.kind {
            Kind::Zero { abs_prec } => *abs_prec,
            Kind::Nonzero { valuation, rel_prec, .. } => valuation + *rel_prec as i64,
        }
    }

    pub fn rel_prec(&self) -> Option<u32> {
        match &self.kind {
            Kind::Zero { .. } => None,
            Kind::Nonzero { rel_prec, .. } => Some(*rel_prec),
        }
    }

    /// The unit mantissa `m`, `0 < m < p^r`.
    pub fn unit(&self) -> Option<&BigInt> {
        match &self.kind {
            Kind::Zero { .. } => None,
            Kind::Nonzero { unit, .. } => Some(unit),
        }
    }

    /// `|x|_p = 1`.
    pub fn is_unit(&self) -> bool {
        self.exact_valuation() == Some(0)
    }

    pub fn arith(op: PadicOp, x: &PadicNumber, y: &PadicNumber) -> Result<PadicNumber> {
        match op {
            PadicOp::Add => x.add(y),
            PadicOp::Sub => x.sub(y),
            PadicOp::Mul => x.mul(y),
        }
    }

    pub fn add(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.p.check_same(other.p)?;
        let n = min(self.abs_prec(), other.abs_prec());
        Ok(match (&self.kind, &other.kind) {
            (Kind::Zero { .. }, _) => other.truncate(n),
            (_, Kind::Zero { .. }) => self.truncate(n),
            (
                Kind::Nonzero { valuation: va, unit: ua, .. },
                Kind::Nonzero { valuation: vb, unit: ub, .. },
            ) => {
                let v = min(*va, *vb);
                let m = ua * self.p.pow((va - v) as u32) + ub * self.p.pow((vb - v) as u32);
                PadicNumber::normalize(self.p, v, &m, n)
            }
        })
    }

    pub fn neg(&self) -> PadicNumber {
        match &self.kind {
            Kind::Zero { .. } => self.clone(),
            Kind::Nonzero { valuation, unit, rel_prec } => PadicNumber {
                p: self.p,
                kind: Kind::Nonzero {
                    valuation: *valuation,
                    unit: self.p.pow(*rel_prec) - unit,
                    rel_prec: *rel_prec,
                },
            },
        }
    }

    pub fn sub(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.p.check_same(other.p)?;
        Ok(match (&self.kind, &other.kind) {
            (Kind::Zero { abs_prec: a }, Kind::Zero { abs_prec: b }) => PadicNumber::zero(self.p, a + b),
            (Kind::Zero { abs_prec: a }, Kind::Nonzero { valuation, .. })
            | (Kind::Nonzero { valuation, .. }, Kind::Zero { abs_prec: a }) => {
                PadicNumber::zero(self.p, a + valuation)
            }
            (
                Kind::Nonzero { valuation: va, unit: ua, rel_prec: ra },
                Kind::Nonzero { valuation: vb, unit: ub, rel_prec: rb },
            ) => {
                let r = min(*ra, *rb);
                let unit = (ua * ub).mod_floor(&self.p.pow(r));
                PadicNumber { p: self.p, kind: Kind::Nonzero { valuation: va + vb, unit, rel_prec: r } }
            }
        })
    }

    /// Multiplicative inverse; relative precision is preserved.
    pub fn invert(&self) -> Result<PadicNumber> {
        match &self.kind {
            Kind::Zero { abs_prec } => Err(Error::NotInvertible { p: self.p.get(), abs_prec: *abs_prec }),
            Kind::Nonzero { valuation, unit, rel_prec } => {
                let modulus = self.p.pow(*rel_prec);
                let inv = mod_inverse(unit, &modulus).ok_or_else(|| Error::Internal("unit without inverse".into()))?;
                Ok(PadicNumber {
                    p: self.p,
                    kind: Kind::Nonzero { valuation: -valuation, unit: inv, rel_prec: *rel_prec },
                })
            }
        }
    }

    pub fn div(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.mul(&other.invert()?)
    }

    pub fn pow(&self, mut e: u64) -> Result<PadicNumber> {
        let mut acc: Option<PadicNumber> = None;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        match acc {
            Some(a) => Ok(a),
            // x^0 = 1, as precise as the representation of x allows
            None => Ok(PadicNumber::normalize(self.p, 0, &BigInt::one(), self.rel_prec().unwrap_or(1).max(1) as i64)),
        }
    }

    /// Multiply by an exact nonzero integer.
    pub fn mul_int(&self, n: &BigInt) -> Result<PadicNumber> {
        if n.is_zero() {
            return Err(Error::domain("multiplication by the exact integer 0 has no finite precision"));
        }
        let (k, m) = split_p_power(n, self.p);
        Ok(match &self.kind {
            Kind::Zero { abs_prec } => PadicNumber::zero(self.p, abs_prec + k as i64),
            Kind::Nonzero { valuation, unit, rel_prec } => {
                let unit = (unit * m).mod_floor(&self.p.pow(*rel_prec));
                PadicNumber {
                    p: self.p,
                    kind: Kind::Nonzero { valuation: valuation + k as i64, unit, rel_prec: *rel_prec },
                }
            }
        })
    }

    /// Divide by an exact nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Result<PadicNumber> {
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (k, m) = split_p_power(n, self.p);
        Ok(match &self.kind {
            Kind::Zero { abs_prec } => PadicNumber::zero(self.p, abs_prec - k as i64),
            Kind::Nonzero { valuation, unit, rel_prec } => {
                let modulus = self.p.pow(*rel_prec);
                let inv = mod_inverse(&m, &modulus).ok_or_else(|| Error::Internal("unit without inverse".into()))?;
                PadicNumber {
                    p: self.p,
                    kind: Kind::Nonzero {
                        valuation: valuation - k as i64,
                        unit: (unit * inv).mod_floor(&modulus),
                        rel_prec: *rel_prec,
                    },
                }
            }
        })
    }

    /// Forget digits at and beyond `p^abs_prec` (no-op if already less precise).
    pub fn truncate(&self, abs_prec: i64) -> PadicNumber {
        if abs_prec >= self.abs_prec() {
            return self.clone();
        }
        match &self.kind {
            Kind::Zero { .. } => PadicNumber::zero(self.p, abs_prec),
            Kind::Nonzero { valuation, unit, .. } => PadicNumber::normalize(self.p, *valuation, unit, abs_prec),
        }
    }

    /// Treat the stored representative as exact and attach precision `abs_prec`.
    /// Lowers precision like [`truncate`](Self::truncate) when `abs_prec` is smaller.
    pub fn lift_exact(&self, abs_prec: i64) -> PadicNumber {
        match &self.kind {
            Kind::Zero { .. } => PadicNumber::zero(self.p, abs_prec),
            Kind::Nonzero { valuation, unit, .. } => PadicNumber::normalize(self.p, *valuation, unit, abs_prec),
        }
    }

    /// Little-endian base-`p` digits of the mantissa, exactly `r` of them.
    /// The offset of the first digit is the valuation; zero-to-precision
    /// values have no digits.
    pub fn digits(&self) -> Vec<u64> {
        match &self.kind {
            Kind::Zero { .. } => Vec::new(),
            Kind::Nonzero { unit, rel_prec, .. } => {
                let pb = self.p.big();
                let mut m = unit.clone();
                let mut out = Vec::with_capacity(*rel_prec as usize);
                for _ in 0..*rel_prec {
                    let (q, r) = m.div_mod_floor(&pb);
                    out.push(r.to_string().parse().expect("digit below p"));
                    m = q;
                }
                out
            }
        }
    }

    /// The stored representative `p^v * m` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        match &self.kind {
            Kind::Zero { .. } => BigRational::zero(),
            Kind::Nonzero { valuation, unit, .. } => {
                let pv = self.p.pow(valuation.unsigned_abs() as u32);
                if *valuation >= 0 {
                    BigRational::from_integer(unit * pv)
                } else {
                    BigRational::new(unit.clone(), pv)
                }
            }
        }
    }

    /// Canonical residue of `x` modulo `p^j`.
    pub fn reduce_mod(&self, j: u32) -> Result<ResidueClass> {
        if let Kind::Nonzero { valuation, .. } = &self.kind {
            if *valuation < 0 {
                return Err(Error::NotAnInteger(*valuation));
            }
        }
        if self.abs_prec() < j as i64 {
            return Err(Error::InsufficientPrecision { needed: j as i64, available: self.abs_prec() });
        }
        let rep = match &self.kind {
            Kind::Zero { .. } => BigInt::zero(),
            Kind::Nonzero { valuation, unit, .. } => unit * self.p.pow(*valuation as u32),
        };
        Ok(ResidueClass::new(self.p, j, &rep))
    }

    /// `true` when `self - other` is zero to the common precision.
    pub fn agrees_with(&self, other: &PadicNumber) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// `true` when the value certainly has valuation `>= n`.
    pub fn is_in_ball(&self, n: i64) -> bool {
        self.valuation().is_at_least(n)
    }

    /// Rational norm `p^(-v)`; zero-to-precision maps to 0.
    pub fn norm(&self) -> BigRational {
        match &self.kind {
            Kind::Zero { .. } => BigRational::zero(),
            Kind::Nonzero { valuation, .. } => {
                let pv = self.p.pow(valuation.unsigned_abs() as u32);
                if *valuation >= 0 {
                    BigRational::new(BigInt::one(), pv)
                } else {
                    BigRational::from_integer(pv)
                }
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn signum_free_unit_check(&self) -> bool {
        use num_traits::Signed;
        match &self.kind {
            Kind::Zero { .. } => true,
            Kind::Nonzero { unit, rel_prec, .. } => {
                unit.is_positive() && unit < &self.p.pow(*rel_prec) && !unit.is_multiple_of(&self.p.big())
            }
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pretty())
    }
}
