use std::cmp::min;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::CoeffField;
use crate::error::{Error, Result};
use crate::ext::Valuation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

/// A power series `c_0 + c_1 T + ... + c_{N-1} T^{N-1} + O(T^N)`.
///
/// The number of stored coefficients is the order precision `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<F: CoeffField> {
    field: F,
    coeffs: Vec<F::Elem>,
}

/// `|f|_r = r^n(f)`, kept as the pair `(r, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsR {
    Power { r: BigRational, exponent: i64 },
    /// Zero to the known order: `|f|_r <= r^order_prec`.
    Zero { r: BigRational, order_prec: i64 },
}

impl AbsR {
    /// The exact rational value; zero series map to 0.
    pub fn value(&self) -> BigRational {
        match self {
            AbsR::Power { r, exponent } => {
                let base = if *exponent >= 0 { r.clone() } else { r.recip() };
                num_traits::pow(base, exponent.unsigned_abs() as usize)
            }
            AbsR::Zero { .. } => BigRational::zero(),
        }
    }

    pub fn exponent(&self) -> Option<i64> {
        match self {
            AbsR::Power { exponent, .. } => Some(*exponent),
            AbsR::Zero { .. } => None,
        }
    }
}

pub(crate) fn check_radius(r: &BigRational) -> Result<()> {
    if *r <= BigRational::zero() || *r >= BigRational::one() {
        return Err(Error::domain(format!("radius {r} is not in (0, 1)")));
    }
    Ok(())
}

impl<F: CoeffField> PowerSeries<F> {
    /// Series with the given coefficients; order precision is their count.
    pub fn new(field: F, coeffs: Vec<F::Elem>) -> Self {
        PowerSeries { field, coeffs }
    }

    /// Integer coefficients, padded with zeros (or truncated) to `order_prec`.
    pub fn from_i64s(field: F, coeffs: &[i64], order_prec: usize) -> Self {
        let mut cs: Vec<F::Elem> = coeffs.iter().take(order_prec).map(|&c| field.from_i64(c)).collect();
        cs.resize(order_prec, field.zero());
        PowerSeries { field, coeffs: cs }
    }

    pub fn zero(field: F, order_prec: usize) -> Self {
        let coeffs = vec![field.zero(); order_prec];
        PowerSeries { field, coeffs }
    }

    pub fn one(field: F, order_prec: usize) -> Self {
        PowerSeries::monomial(field, 0, order_prec)
    }

    /// `T^k + O(T^order_prec)`.
    pub fn monomial(field: F, k: usize, order_prec: usize) -> Self {
        let mut s = PowerSeries::zero(field, order_prec);
        if k < order_prec {
            s.coeffs[k] = s.field.one();
        }
        s
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn order_prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&F::Elem> {
        self.coeffs.get(j)
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn truncate(&self, order_prec: usize) -> Self {
        let n = min(order_prec, self.order_prec());
        PowerSeries { field: self.field.clone(), coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn arith(op: SeriesOp, f: &Self, g: &Self) -> Result<Self> {
        match op {
            SeriesOp::Add => f.add(g),
            SeriesOp::Sub => f.sub(g),
            SeriesOp::Mul => f.mul(g),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let n = min(self.order_prec(), other.order_prec());
        let coeffs = (0..n).map(|j| self.field.add(&self.coeffs[j], &other.coeffs[j])).collect();
        Ok(PowerSeries { field: self.field.clone(), coeffs })
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        PowerSeries { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        PowerSeries { field: self.field.clone(), coeffs }
    }

    /// Cauchy product `(fg)_n = sum_{j<=n} f_j g_{n-j}`, truncated to the
    /// smaller order precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = min(self.order_prec(), other.order_prec());
        let coeffs = self.field.convolve(&self.coeffs, &other.coeffs, n);
        PowerSeries { field: self.field.clone(), coeffs }
    }

    /// `n(f)`: index of the first nonzero coefficient, or `>= N`.
    pub fn order(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !self.field.is_zero(c)) {
            Some(n) => Valuation::Exact(n as i64),
            None => Valuation::AtLeast(self.order_prec() as i64),
        }
    }

    /// `(1 - a)^{-1} = sum_l a^l` for `a` with zero constant term.
    ///
    /// `a^l` has order at least `l`, so the sum stops once a power vanishes
    /// modulo `T^N`.
    pub fn invert_one_minus(&self) -> Result<Self> {
        let f = &self.field;
        let n = self.order_prec();
        if n > 0 && !f.is_zero(&self.coeffs[0]) {
            return Err(Error::domain("invert_one_minus needs a series with zero constant term"));
        }
        let mut sum = PowerSeries::one(f.clone(), n);
        let mut power = PowerSeries::one(f.clone(), n);
        for _ in 1..n {
            power = power.mul_unchecked(self);
            if power.order().exact().is_none() {
                break;
            }
            sum = sum.add(&power)?;
        }
        Ok(sum)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert(&self) -> Result<Self> {
        let f = &self.field;
        let c0 = self.coeffs.first().ok_or(Error::DivisionByZero)?;
        let c_inv = f.inv(c0).ok_or(Error::DivisionByZero)?;
        // self = c0 (1 - a) with a = 1 - self / c0
        let a = PowerSeries::one(f.clone(), self.order_prec()).sub(&self.scale(&c_inv))?;
        Ok(a.invert_one_minus()?.scale(&c_inv))
    }

    /// `f(g(T))` for `g` with zero constant term, by Horner's rule over
    /// powers of `g`. Order precision is `min(N_f, N_g)`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check_field(g)?;
        let f = &self.field;
        if g.order_prec() > 0 && !f.is_zero(&g.coeffs[0]) {
            return Err(Error::domain("composition needs an inner series with zero constant term"));
        }
        let n = min(self.order_prec(), g.order_prec());
        let g = g.truncate(n);
        let mut acc = PowerSeries::zero(f.clone(), n);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul_unchecked(&g);
            if n > 0 {
                acc.coeffs[0] = f.add(&acc.coeffs[0], c);
            }
        }
        Ok(acc)
    }

    /// Formal derivative `sum j c_j T^{j-1}`; order precision drops by one.
    pub fn derive(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| f.mul(&f.from_i64(j as i64), c))
            .collect();
        PowerSeries { field: f.clone(), coeffs }
    }

    /// `|f|_r = r^n(f)` for rational `r` in `(0, 1)`.
    pub fn abs_r(&self, r: &BigRational) -> Result<AbsR> {
        check_radius(r)?;
        Ok(match self.order() {
            Valuation::Exact(n) => AbsR::Power { r: r.clone(), exponent: n },
            Valuation::AtLeast(n) => AbsR::Zero { r: r.clone(), order_prec: n },
        })
    }
}
