//! Pretty and JSON forms of power and Laurent series.
//!
//! ```text
//! 1 + 2*T^2 + O(T^4)
//! T^-1 + 1 + T + O(T^3)
//! {"field":{"Fp":3},"order_prec":4,"coeffs":[1,0,2,0]}
//! ```

use serde::{Deserialize, Serialize};

use super::field::{CoeffField, FieldDescriptor};
use super::laurent::LaurentSeries;
use super::power::PowerSeries;
use crate::error::{Error, Result};
use crate::terms::signed_chunks;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub field: FieldDescriptor,
    pub order_prec: i64,
    pub coeffs: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_valuation: Option<i64>,
}

fn render<F: CoeffField>(field: &F, terms: impl Iterator<Item = (i64, F::Elem)>, abs_order: i64) -> String {
    let mut out = String::new();
    for (e, c) in terms {
        if field.is_zero(&c) {
            continue;
        }
        let text = field.format_elem(&c);
        let body = if e == 0 {
            text
        } else {
            let base = if e == 1 { "T".to_string() } else { format!("T^{e}") };
            if field.is_one(&c) {
                base
            } else if text == "-1" {
                format!("-{base}")
            } else {
                format!("{text}*{base}")
            }
        };
        if out.is_empty() {
            out.push_str(&body);
        } else if let Some(rest) = body.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    if !out.is_empty() {
        out.push_str(" + ");
    }
    out.push_str(&format!("O(T^{abs_order})"));
    out
}

fn parse_terms<F: CoeffField>(field: &F, s: &str) -> Result<(Vec<(i64, F::Elem)>, i64)> {
    let chunks = signed_chunks(s);
    let (last, rest) = chunks.split_last().ok_or_else(|| Error::parse("empty series"))?;
    let order_text = last.trim_start_matches('+');
    let order: i64 = order_text
        .strip_prefix("O(T")
        .and_then(|r| r.strip_suffix(')'))
        .map(|r| if r.is_empty() { Ok(1) } else { r.trim_start_matches('^').parse::<i64>() })
        .ok_or_else(|| Error::parse(format!("expected O(T^N), got {last:?}")))?
        .map_err(|_| Error::parse(format!("bad order term {last:?}")))?;
    let mut terms: Vec<(i64, F::Elem)> = Vec::new();
    for chunk in rest {
        let (neg, body) = match chunk.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, chunk.trim_start_matches('+')),
        };
        let (coeff_text, exp) = match body.find('T') {
            None => (body.to_string(), 0),
            Some(pos) => {
                let (c, t) = body.split_at(pos);
                let exp = match t.strip_prefix("T^") {
                    Some(e) => e.parse::<i64>().map_err(|_| Error::parse(format!("bad exponent in {chunk:?}")))?,
                    None if t == "T" => 1,
                    None => return Err(Error::parse(format!("bad term {chunk:?}"))),
                };
                let c = match c.strip_suffix('*') {
                    Some(c) => c.to_string(),
                    None if c.is_empty() => "1".to_string(),
                    None => return Err(Error::parse(format!("bad term {chunk:?}"))),
                };
                (c, exp)
            }
        };
        let coeff = field.parse_elem(&if neg { format!("-{coeff_text}") } else { coeff_text })?;
        if exp >= order {
            return Err(Error::parse(format!("term {chunk:?} lies beyond O(T^{order})")));
        }
        if terms.iter().any(|(e, _)| *e == exp) {
            return Err(Error::parse(format!("exponent {exp} repeated")));
        }
        terms.push((exp, coeff));
    }
    Ok((terms, order))
}

fn check_descriptor<F: CoeffField>(field: &F, d: FieldDescriptor) -> Result<()> {
    if field.descriptor() == d {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

impl<F: CoeffField> PowerSeries<F> {
    pub fn to_pretty(&self) -> String {
        let terms = self.coeffs().iter().cloned().enumerate().map(|(j, c)| (j as i64, c));
        render(self.field(), terms, self.order_prec() as i64)
    }

    pub fn parse_pretty(field: &F, s: &str) -> Result<Self> {
        let (terms, order) = parse_terms(field, s)?;
        if order < 0 {
            return Err(Error::parse("power series order precision must be nonnegative"));
        }
        let mut coeffs = vec![field.zero(); order as usize];
        for (e, c) in terms {
            if e < 0 {
                return Err(Error::parse("negative exponent in a power series"));
            }
            coeffs[e as usize] = c;
        }
        Ok(PowerSeries::new(field.clone(), coeffs))
    }

    pub fn to_json_repr(&self) -> SeriesJson {
        SeriesJson {
            field: self.field().descriptor(),
            order_prec: self.order_prec() as i64,
            coeffs: self.coeffs().iter().map(|c| self.field().elem_to_json(c)).collect(),
            tail_valuation: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain struct serializes")
    }

    pub fn from_json_repr(field: &F, j: &SeriesJson) -> Result<Self> {
        check_descriptor(field, j.field)?;
        if j.tail_valuation.is_some() {
            return Err(Error::parse("tail_valuation is only valid for Laurent series"));
        }
        if j.order_prec < 0 || j.coeffs.len() as i64 != j.order_prec {
            return Err(Error::parse("coefficient count must equal order_prec"));
        }
        let coeffs = j.coeffs.iter().map(|v| field.elem_from_json(v)).collect::<Result<_>>()?;
        Ok(PowerSeries::new(field.clone(), coeffs))
    }

    pub fn from_json(field: &F, s: &str) -> Result<Self> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        PowerSeries::from_json_repr(field, &j)
    }

    /// JSON when the text starts with `{`, pretty form otherwise.
    pub fn parse_any(field: &F, s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            PowerSeries::from_json(field, s)
        } else {
            PowerSeries::parse_pretty(field, s)
        }
    }
}

impl<F: CoeffField> LaurentSeries<F> {
    pub fn to_pretty(&self) -> String {
        let (shift, coeffs) = self.expanded();
        let shift = shift.unwrap_or(0);
        let terms = coeffs.into_iter().enumerate().map(|(i, c)| (shift + i as i64, c));
        render(self.field(), terms, self.abs_order())
    }

    pub fn parse_pretty(field: &F, s: &str) -> Result<Self> {
        let (terms, order) = parse_terms(field, s)?;
        let Some(shift) = terms.iter().filter(|(_, c)| !field.is_zero(c)).map(|(e, _)| *e).min() else {
            return Ok(LaurentSeries::zero(field.clone(), order));
        };
        let mut coeffs = vec![field.zero(); (order - shift) as usize];
        for (e, c) in terms {
            if e >= shift {
                coeffs[(e - shift) as usize] = c;
            }
        }
        Ok(LaurentSeries::from_coeffs(field.clone(), shift, coeffs))
    }

    pub fn to_json_repr(&self) -> SeriesJson {
        let (shift, coeffs) = self.expanded();
        SeriesJson {
            field: self.field().descriptor(),
            order_prec: self.abs_order(),
            coeffs: coeffs.iter().map(|c| self.field().elem_to_json(c)).collect(),
            tail_valuation: shift,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain struct serializes")
    }

    pub fn from_json_repr(field: &F, j: &SeriesJson) -> Result<Self> {
        check_descriptor(field, j.field)?;
        if j.tail_valuation.is_none() && j.coeffs.is_empty() {
            return Ok(LaurentSeries::zero(field.clone(), j.order_prec));
        }
        let shift = j.tail_valuation.unwrap_or(0);
        if j.coeffs.len() as i64 != j.order_prec - shift {
            return Err(Error::parse("coefficient count must equal order_prec - tail_valuation"));
        }
        let coeffs = j.coeffs.iter().map(|v| field.elem_from_json(v)).collect::<Result<_>>()?;
        Ok(LaurentSeries::from_coeffs(field.clone(), shift, coeffs))
    }

    pub fn from_json(field: &F, s: &str) -> Result<Self> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        LaurentSeries::from_json_repr(field, &j)
    }

    pub fn parse_any(field: &F, s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            LaurentSeries::from_json(field, s)
        } else {
            LaurentSeries::parse_pretty(field, s)
        }
    }
}
