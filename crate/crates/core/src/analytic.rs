//! Polynomials over `Q_p` as analytic functions on closed balls
//! `B̄(0, p^-m)`, with the Lipschitz-type bounds used by Hensel lifting and
//! radius-of-convergence certificates for infinite series.
//!
//! Radii are always powers of `p`, written as valuation exponents: the ball
//! `{x : v(x) >= m}` has radius `p^-m`. A real radius such as `p^(-1/(p-1))`
//! enters only through [`min_valuation_above`], which turns a strict bound
//! `|x| < p^-q` into the integer condition `v(x) >= floor(q) + 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::padic::{PadicJson, PadicNumber, Qp};
use crate::prime_field::Prime;
use crate::terms::signed_chunks;

/// `sum_j a_j x^j` with coefficients in `Q_p`.
///
/// Trailing coefficients that are zero to their precision are dropped, so the
/// leading coefficient of a nonconstant polynomial has an exact valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicPolynomial {
    p: Prime,
    coeffs: Vec<PadicNumber>,
}

impl PadicPolynomial {
    /// `coeffs[j]` is the coefficient of `x^j`. An empty list is rejected.
    pub fn new(p: Prime, coeffs: Vec<PadicNumber>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a polynomial needs at least one coefficient"));
        }
        for c in &coeffs {
            p.check_same(c.prime())?;
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(PadicNumber::is_zero) {
            coeffs.pop();
        }
        Ok(PadicPolynomial { p, coeffs })
    }

    /// Integer coefficients known to `abs_prec` digits.
    pub fn from_integers(ctx: &Qp, coeffs: &[i64], abs_prec: i64) -> Result<Self> {
        let cs = coeffs.iter().map(|&c| ctx.integer(c, abs_prec)).collect::<Result<_>>()?;
        PadicPolynomial::new(ctx.prime(), cs)
    }

    pub fn from_big_integers(ctx: &Qp, coeffs: &[BigInt], abs_prec: i64) -> Result<Self> {
        let cs = coeffs.iter().map(|c| ctx.integer(c.clone(), abs_prec)).collect::<Result<_>>()?;
        PadicPolynomial::new(ctx.prime(), cs)
    }

    pub fn from_rationals(ctx: &Qp, coeffs: &[BigRational], abs_prec: i64) -> Result<Self> {
        let cs = coeffs.iter().map(|c| ctx.big_rational(c, abs_prec)).collect::<Result<_>>()?;
        PadicPolynomial::new(ctx.prime(), cs)
    }

    /// `x^n` with coefficient known to `abs_prec`.
    pub fn monomial(ctx: &Qp, n: usize, abs_prec: i64) -> Result<Self> {
        let mut cs = vec![0; n + 1];
        cs[n] = 1;
        PadicPolynomial::from_integers(ctx, &cs, abs_prec)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&PadicNumber> {
        self.coeffs.get(j)
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Smallest absolute precision among the coefficients.
    pub fn coeff_precision(&self) -> i64 {
        self.coeffs.iter().map(PadicNumber::abs_prec).min().unwrap_or(i64::MAX)
    }

    /// Horner evaluation; precision is tracked through every step.
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        self.p.check_same(x.prime())?;
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    /// Evaluate at `x` after checking `x` lies in `B̄(0, p^-m)`.
    pub fn eval_on_ball(&self, x: &PadicNumber, m: i64) -> Result<PadicNumber> {
        self.p.check_same(x.prime())?;
        if !x.is_in_ball(m) {
            return Err(Error::domain(format!("point with valuation {} lies outside v(x) >= {m}", x.valuation())));
        }
        self.eval(x)
    }

    /// Formal derivative `sum j a_j x^(j-1)`.
    pub fn derivative(&self) -> PadicPolynomial {
        if self.coeffs.len() == 1 {
            let prec = self.coeffs[0].abs_prec();
            return PadicPolynomial { p: self.p, coeffs: vec![PadicNumber::zero(self.p, prec)] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, a)| {
                let d = a.mul_int(&BigInt::from(j)).expect("j >= 1");
                debug_assert!(d.valuation().lower_bound() >= a.valuation().lower_bound());
                d
            })
            .collect();
        PadicPolynomial::new(self.p, coeffs).expect("same prime")
    }

    /// `g(y) = f(x0 + y)`, with `g_l = sum_{j >= l} a_j C(j, l) x0^(j-l)`.
    pub fn recenter(&self, x0: &PadicNumber) -> Result<PadicPolynomial> {
        self.p.check_same(x0.prime())?;
        let n = self.coeffs.len();
        // powers[k] = x0^k for k >= 1
        let mut powers: Vec<PadicNumber> = Vec::with_capacity(n);
        for k in 0..n {
            powers.push(match k {
                0 => x0.clone(),
                1 => x0.clone(),
                _ => powers[k - 1].mul(x0)?,
            });
        }
        let mut out = Vec::with_capacity(n);
        for l in 0..n {
            let mut acc = self.coeffs[l].clone();
            for j in (l + 1)..n {
                let c = binomial(BigInt::from(j), BigInt::from(l));
                let term = self.coeffs[j].mul(&powers[j - l])?.mul_int(&c)?;
                acc = acc.add(&term)?;
            }
            out.push(acc);
        }
        PadicPolynomial::new(self.p, out)
    }

    /// `f + c`.
    pub fn add_constant(&self, c: &PadicNumber) -> Result<PadicPolynomial> {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].add(c)?;
        PadicPolynomial::new(self.p, coeffs)
    }

    /// Lipschitz exponent `mu1 = min_{j >= 1} (v(a_j) + (j-1) m)` on
    /// `B̄(0, p^-m)`: `v(f(x) - f(y)) >= mu1 + v(x - y)` there.
    pub fn m1_bound(&self, m: i64) -> Result<i64> {
        if self.degree() == 0 {
            return Err(Error::UndefinedBound);
        }
        Ok(self.weighted_min(1, m).finite().expect("degree >= 1"))
    }

    /// Second-order exponent `mu2 = min_{j >= 2} (v(a_j) + (j-2) m)`:
    /// `v(f(x) - f(y) - f'(y)(x - y)) >= mu2 + 2 v(x - y)` on the ball.
    /// Infinite for polynomials of degree below 2.
    pub fn m2_bound(&self, m: i64) -> ExtInt {
        self.weighted_min(2, m)
    }

    /// `min_{j >= start} (v(a_j) + (j - start) m)`, using the precision of a
    /// zero-to-precision coefficient as its valuation bound.
    fn weighted_min(&self, start: usize, m: i64) -> ExtInt {
        self.coeffs
            .iter()
            .enumerate()
            .skip(start)
            .map(|(j, a)| ExtInt::Finite(a.valuation().lower_bound() + (j - start) as i64 * m))
            .min()
            .unwrap_or(ExtInt::Infinite)
    }

    pub fn to_json_repr(&self) -> PolynomialJson {
        PolynomialJson { p: self.p.get(), coeffs: self.coeffs.iter().map(PadicNumber::to_json_repr).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: PolynomialJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        let p = Prime::new(j.p)?;
        let coeffs = j.coeffs.iter().map(PadicNumber::from_json_repr).collect::<Result<_>>()?;
        PadicPolynomial::new(p, coeffs)
    }

    /// Parses JSON, or an expression such as `x^2 - 2`, `3*x^3 + 1/2*x - 7`
    /// whose rational coefficients are read to precision `abs_prec`.
    pub fn parse(s: &str, ctx: &Qp, abs_prec: i64) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            let f = PadicPolynomial::from_json(s)?;
            ctx.prime().check_same(f.prime())?;
            return Ok(f);
        }
        let chunks = signed_chunks(s);
        if chunks.is_empty() {
            return Err(Error::parse("empty polynomial"));
        }
        let mut coeffs: Vec<BigRational> = Vec::new();
        for chunk in &chunks {
            let (neg, body) = match chunk.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, chunk.trim_start_matches('+')),
            };
            let (coeff_text, exp) = match body.find(['x', 'X']) {
                None => (body, 0usize),
                Some(pos) => {
                    let (c, t) = body.split_at(pos);
                    let exp = match &t[1..] {
                        "" => 1,
                        e => e
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::parse(format!("bad exponent in {chunk:?}")))?,
                    };
                    (c.strip_suffix('*').unwrap_or(c), exp)
                }
            };
            let coeff = if coeff_text.is_empty() {
                BigRational::from_integer(BigInt::from(1))
            } else {
                let (a, b) = crate::padic::parse_rational(coeff_text)?;
                if b.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                BigRational::new(a, b)
            };
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigRational::zero());
            }
            coeffs[exp] += if neg { -coeff } else { coeff };
        }
        PadicPolynomial::from_rationals(ctx, &coeffs, abs_prec)
    }
}

impl fmt::Display for PadicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})*x")?,
                _ => write!(f, "({a})*x^{j}")?,
            }
        }
        if first {
            write!(f, "({})", self.coeffs[0])?;
        }
        Ok(())
    }
}

/// `{"p":7,"coeffs":[<padic>...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub p: u64,
    pub coeffs: Vec<PadicJson>,
}

/// Smallest integer `v` with `v > q`, so that `|x| < p^-q` iff `v(x) >= v`.
pub fn min_valuation_above(q: &BigRational) -> i64 {
    let fl = q.numer().div_floor(q.denom());
    i64::try_from(fl + 1).expect("threshold fits in i64")
}

/// Certificate `v(a_j) >= slope*j - logflag*floor(log_p j) - offset` for the
/// coefficients of `sum a_j x^j`, read as sharp along `j = p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationGrowthRule {
    slope: BigRational,
    logflag: bool,
    offset: i64,
}

impl ValuationGrowthRule {
    pub fn new(slope: BigRational, logflag: bool, offset: i64) -> Result<Self> {
        if slope.is_negative() {
            return Err(Error::domain("unsupported growth rule: negative slope"));
        }
        Ok(ValuationGrowthRule { slope, logflag, offset })
    }

    /// `a_j = p^(s j)` style geometric tails.
    pub fn geometric(slope: i64) -> Result<Self> {
        ValuationGrowthRule::new(BigRational::from_integer(slope.into()), false, 0)
    }

    /// `v(a_j) = -v_p(j)`, the shape of `log(1 + x)`.
    pub fn log() -> Self {
        ValuationGrowthRule { slope: BigRational::zero(), logflag: true, offset: 0 }
    }

    pub fn slope(&self) -> &BigRational {
        &self.slope
    }

    pub fn logflag(&self) -> bool {
        self.logflag
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Lower bound for `v(a_j)`, `j >= 1`.
    pub fn coeff_bound(&self, p: Prime, j: u64) -> BigRational {
        let l = if self.logflag { crate::prime_field::floor_log(j, p.get()) as i64 } else { 0 };
        &self.slope * BigRational::from_integer(j.into()) - BigRational::from_integer((l + self.offset).into())
    }
}

/// Radius `rho = p^s` of a series obeying a [`ValuationGrowthRule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRadius {
    /// `s` in `rho = p^s`.
    pub exponent: BigRational,
    /// Whether the terms tend to 0 on `|x| = rho`. Always `false` for a
    /// sharp rule; meaningful only when `exponent` is an integer.
    pub boundary_terms_vanish: bool,
}

impl ConvergenceRadius {
    /// The series converges at `x` iff `v(x) >= min_valuation()`.
    pub fn min_valuation(&self) -> i64 {
        let above = min_valuation_above(&-&self.exponent);
        if self.exponent.is_integer() && self.boundary_terms_vanish {
            above - 1
        } else {
            above
        }
    }

    pub fn converges_at(&self, x: &PadicNumber) -> bool {
        x.is_in_ball(self.min_valuation())
    }
}

/// `rho = (limsup |a_j|^(1/j))^-1`. With `v(a_j) ~ s j - O(log j)` this is
/// `p^s`; at `|x| = p^s` the term valuations `-logflag*floor(log_p j) - offset`
/// stay bounded, so the terms do not tend to 0 there.
pub fn radius_of_convergence(rule: &ValuationGrowthRule) -> ConvergenceRadius {
    ConvergenceRadius { exponent: rule.slope.clone(), boundary_terms_vanish: false }
}
