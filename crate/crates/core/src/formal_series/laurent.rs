use std::cmp::min;

use num_rational::BigRational;

use super::field::CoeffField;
use super::power::{check_radius, AbsR, PowerSeries};
use crate::error::{Error, Result};
use crate::ext::Valuation;

#[derive(Debug, Clone, PartialEq)]
enum Repr<F: CoeffField> {
    /// All known coefficients vanish below `T^order`.
    Zero { field: F, order: i64 },
    /// `T^valuation * unit` with `unit_0 != 0`.
    Nonzero { valuation: i64, unit: PowerSeries<F> },
}

/// A formal Laurent series `c T^n (1 - T b(T))`, known modulo `T^(n + len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<F: CoeffField> {
    repr: Repr<F>,
}

impl<F: CoeffField> LaurentSeries<F> {
    pub fn zero(field: F, order: i64) -> Self {
        LaurentSeries { repr: Repr::Zero { field, order } }
    }

    /// `sum_i coeffs[i] T^(shift + i) + O(T^(shift + len))`.
    pub fn from_coeffs(field: F, shift: i64, coeffs: Vec<F::Elem>) -> Self {
        let abs = shift + coeffs.len() as i64;
        match coeffs.iter().position(|c| !field.is_zero(c)) {
            None => LaurentSeries::zero(field, abs),
            Some(k) => {
                let unit = PowerSeries::new(field, coeffs[k..].to_vec());
                LaurentSeries { repr: Repr::Nonzero { valuation: shift + k as i64, unit } }
            }
        }
    }

    pub fn from_power_series(f: &PowerSeries<F>) -> Self {
        LaurentSeries::from_coeffs(f.field().clone(), 0, f.coeffs().to_vec())
    }

    /// `T^n + O(T^(n + rel_prec))`.
    pub fn monomial(field: F, n: i64, rel_prec: usize) -> Self {
        let mut cs = vec![field.zero(); rel_prec];
        if rel_prec > 0 {
            cs[0] = field.one();
        }
        LaurentSeries::from_coeffs(field, n, cs)
    }

    pub fn field(&self) -> &F {
        match &self.repr {
            Repr::Zero { field, .. } => field,
            Repr::Nonzero { unit, .. } => unit.field(),
        }
    }

    /// Tail valuation `n(f)`, or a lower bound for zero-to-order values.
    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { order, .. } => Valuation::AtLeast(*order),
            Repr::Nonzero { valuation, .. } => Valuation::Exact(*valuation),
        }
    }

    /// The series is known modulo `T^abs_order`.
    pub fn abs_order(&self) -> i64 {
        match &self.repr {
            Repr::Zero { order, .. } => *order,
            Repr::Nonzero { valuation, unit } => valuation + unit.order_prec() as i64,
        }
    }

    pub fn unit(&self) -> Option<&PowerSeries<F>> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { unit, .. } => Some(unit),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// Coefficient of `T^k` for `k` below the known order.
    pub fn coeff(&self, k: i64) -> Option<F::Elem> {
        if k >= self.abs_order() {
            return None;
        }
        let field = self.field();
        Some(match &self.repr {
            Repr::Zero { .. } => field.zero(),
            Repr::Nonzero { valuation, unit } => {
                if k < *valuation {
                    field.zero()
                } else {
                    unit.coeffs()[(k - valuation) as usize].clone()
                }
            }
        })
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { valuation, unit } => {
                LaurentSeries { repr: Repr::Nonzero { valuation: *valuation, unit: unit.neg() } }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let field = self.field().clone();
        let n = min(self.abs_order(), other.abs_order());
        let start = min(self.valuation().lower_bound(), other.valuation().lower_bound());
        if start >= n {
            return Ok(LaurentSeries::zero(field, n));
        }
        let coeffs = (start..n)
            .map(|k| {
                let a = self.coeff(k).expect("below known order");
                let b = other.coeff(k).expect("below known order");
                field.add(&a, &b)
            })
            .collect();
        Ok(LaurentSeries::from_coeffs(field, start, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let field = self.field().clone();
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero { order: a, .. }, Repr::Zero { order: b, .. }) => LaurentSeries::zero(field, a + b),
            (Repr::Zero { order, .. }, Repr::Nonzero { valuation, .. })
            | (Repr::Nonzero { valuation, .. }, Repr::Zero { order, .. }) => {
                LaurentSeries::zero(field, order + valuation)
            }
            (Repr::Nonzero { valuation: a, unit: u }, Repr::Nonzero { valuation: b, unit: w }) => {
                // unit constant terms multiply to a nonzero constant
                LaurentSeries { repr: Repr::Nonzero { valuation: a + b, unit: u.mul(w)? } }
            }
        })
    }

    /// `f^{-1} = c^{-1} T^{-n} (1 - T b(T))^{-1}`.
    pub fn invert(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Nonzero { valuation, unit } => {
                let field = unit.field();
                let c_inv = field.inv(&unit.coeffs()[0]).ok_or(Error::DivisionByZero)?;
                let normalized = unit.scale(&c_inv);
                let a = PowerSeries::one(field.clone(), unit.order_prec()).sub(&normalized)?;
                let inv_unit = a.invert_one_minus()?.scale(&c_inv);
                Ok(LaurentSeries { repr: Repr::Nonzero { valuation: -valuation, unit: inv_unit } })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    /// `|f|_r = r^n(f)`; negative tail valuations give `r^n > 1`.
    pub fn abs_r(&self, r: &BigRational) -> Result<AbsR> {
        check_radius(r)?;
        Ok(match self.valuation() {
            Valuation::Exact(n) => AbsR::Power { r: r.clone(), exponent: n },
            Valuation::AtLeast(n) => AbsR::Zero { r: r.clone(), order_prec: n },
        })
    }

    /// `(shift, coefficients)` such that the series is
    /// `sum coeffs[i] T^(shift + i) + O(T^abs_order)`; `shift` is the tail valuation.
    pub fn expanded(&self) -> (Option<i64>, Vec<F::Elem>) {
        match &self.repr {
            Repr::Zero { .. } => (None, Vec::new()),
            Repr::Nonzero { valuation, unit } => (Some(*valuation), unit.coeffs().to_vec()),
        }
    }
}
