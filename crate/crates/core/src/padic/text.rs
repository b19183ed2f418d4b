//! Pretty, compact and JSON forms of p-adic numbers.
//!
//! ```text
//! pretty:   3 + 1*7 + 2*7^2 + O(7^3)
//! compact:  7^0*[3,1,2]+O(7^3)
//! json:     {"p":7,"valuation":0,"digits":[3,1,2],"abs_prec":3}
//! ```

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{PadicNumber, Qp};
use crate::error::{Error, Result};
use crate::prime_field::Prime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
    pub abs_prec: i64,
}

fn power_term(p: Prime, e: i64) -> String {
    match e {
        1 => format!("{p}"),
        _ => format!("{p}^{e}"),
    }
}

fn mantissa_from_digits(p: Prime, digits: &[u64]) -> Result<BigInt> {
    let pb = p.big();
    let mut acc = BigInt::zero();
    for &d in digits.iter().rev() {
        if d >= p.get() {
            return Err(Error::parse(format!("digit {d} is not below {p}")));
        }
        acc = acc * &pb + BigInt::from(d);
    }
    Ok(acc)
}

fn parse_i64(s: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| Error::parse(format!("expected an integer, got {s:?}")))
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| Error::parse(format!("expected a nonnegative integer, got {s:?}")))
}

/// Parses `p^e` or `p` into `(p, e)`.
fn parse_power(s: &str) -> Result<(u64, i64)> {
    match s.split_once('^') {
        Some((b, e)) => Ok((parse_u64(b)?, parse_i64(e)?)),
        None => Ok((parse_u64(s)?, 1)),
    }
}

/// Parses `O(p^N)`.
fn parse_big_o(s: &str) -> Result<(u64, i64)> {
    let inner = s
        .trim()
        .strip_prefix("O(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::parse(format!("expected O(p^N), got {s:?}")))?;
    parse_power(inner)
}

impl PadicNumber {
    pub fn to_pretty(&self) -> String {
        let p = self.p;
        let n = self.abs_prec();
        let mut terms = Vec::new();
        if let Some(v) = self.exact_valuation() {
            for (i, d) in self.digits().into_iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let e = v + i as i64;
                terms.push(if e == 0 { format!("{d}") } else { format!("{d}*{}", power_term(p, e)) });
            }
        }
        terms.push(format!("O({p}^{n})"));
        terms.join(" + ")
    }

    pub fn to_compact(&self) -> String {
        let p = self.p;
        let n = self.abs_prec();
        match self.exact_valuation() {
            None => format!("O({p}^{n})"),
            Some(v) => {
                let ds: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
                format!("{p}^{v}*[{}]+O({p}^{n})", ds.join(","))
            }
        }
    }

    pub fn to_json_repr(&self) -> PadicJson {
        PadicJson {
            p: self.p.get(),
            valuation: self.exact_valuation(),
            digits: self.digits(),
            abs_prec: self.abs_prec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain struct serializes")
    }

    pub fn from_json_repr(j: &PadicJson) -> Result<PadicNumber> {
        let p = Prime::new(j.p)?;
        match j.valuation {
            None => {
                if !j.digits.is_empty() {
                    return Err(Error::parse("digits given without a valuation"));
                }
                Ok(PadicNumber::zero(p, j.abs_prec))
            }
            Some(v) => {
                if v + j.digits.len() as i64 != j.abs_prec {
                    return Err(Error::parse("valuation + digit count must equal abs_prec"));
                }
                let m = mantissa_from_digits(p, &j.digits)?;
                Ok(PadicNumber::normalize(p, v, &m, j.abs_prec))
            }
        }
    }

    pub fn from_json(s: &str) -> Result<PadicNumber> {
        let j: PadicJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        PadicNumber::from_json_repr(&j)
    }

    pub fn parse_pretty(s: &str) -> Result<PadicNumber> {
        let parts: Vec<&str> = s.split('+').map(str::trim).collect();
        let (last, terms) = parts.split_last().ok_or_else(|| Error::parse("empty input"))?;
        let (p, n) = parse_big_o(last)?;
        let p = Prime::new(p)?;
        let mut digits: Vec<(i64, u64)> = Vec::with_capacity(terms.len());
        for t in terms {
            let (d, e) = match t.split_once('*') {
                None => (parse_u64(t)?, 0),
                Some((d, pow)) => {
                    let (base, e) = parse_power(pow)?;
                    if base != p.get() {
                        return Err(Error::parse(format!("term {t:?} uses base {base}, expected {p}")));
                    }
                    (parse_u64(d)?, e)
                }
            };
            if d >= p.get() {
                return Err(Error::parse(format!("digit {d} is not below {p}")));
            }
            if e >= n {
                return Err(Error::parse(format!("term {t:?} lies beyond O({p}^{n})")));
            }
            if digits.iter().any(|&(e2, _)| e2 == e) {
                return Err(Error::parse(format!("exponent {e} repeated")));
            }
            digits.push((e, d));
        }
        let nonzero: Vec<_> = digits.into_iter().filter(|&(_, d)| d != 0).collect();
        let Some(vmin) = nonzero.iter().map(|&(e, _)| e).min() else {
            return Ok(PadicNumber::zero(p, n));
        };
        let mut m = BigInt::zero();
        for (e, d) in nonzero {
            m += BigInt::from(d) * p.pow((e - vmin) as u32);
        }
        Ok(PadicNumber::normalize(p, vmin, &m, n))
    }

    pub fn parse_compact(s: &str) -> Result<PadicNumber> {
        let s = s.trim();
        let Some((head, tail)) = s.split_once("+O(") else {
            let (p, n) = parse_big_o(s)?;
            return Ok(PadicNumber::zero(Prime::new(p)?, n));
        };
        let (p, n) = parse_big_o(&format!("O({tail}"))?;
        let p = Prime::new(p)?;
        let (pow, list) = head
            .split_once('*')
            .ok_or_else(|| Error::parse(format!("expected p^v*[digits], got {head:?}")))?;
        let (base, v) = parse_power(pow)?;
        if base != p.get() {
            return Err(Error::parse("base and O-term primes differ"));
        }
        let list = list
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::parse("expected a bracketed digit list"))?;
        let digits: Vec<u64> = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',').map(parse_u64).collect::<Result<_>>()?
        };
        PadicNumber::from_json_repr(&PadicJson { p: p.get(), valuation: Some(v), digits, abs_prec: n })
    }

    /// Accepts JSON, compact or pretty forms, or a plain rational `a/b` /
    /// integer which is converted with `ctx` at `abs_prec`. Values carrying
    /// their own prime must agree with `ctx`.
    pub fn parse_any(s: &str, ctx: &Qp, abs_prec: i64) -> Result<PadicNumber> {
        let s = s.trim();
        let x = if s.starts_with('{') {
            PadicNumber::from_json(s)?
        } else if s.contains("O(") {
            if s.contains('[') {
                PadicNumber::parse_compact(s)?
            } else {
                PadicNumber::parse_pretty(s)?
            }
        } else {
            let (a, b) = parse_rational(s)?;
            return ctx.rational(a, b, abs_prec);
        };
        ctx.prime().check_same(x.prime())?;
        Ok(x)
    }
}

/// Parses `a/b` or `a` into a numerator/denominator pair.
pub(crate) fn parse_rational(s: &str) -> Result<(BigInt, BigInt)> {
    let big = |t: &str| -> Result<BigInt> {
        t.trim().parse::<BigInt>().map_err(|_| Error::parse(format!("expected a rational number, got {s:?}")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let b = big(b)?;
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok((big(a)?, b))
        }
        None => Ok((big(s)?, BigInt::from(1))),
    }
}
