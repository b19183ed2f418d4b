//! Formal power series `k[[T]]` and Laurent series `k((T))` over a
//! coefficient field, truncated modulo `T^N`.
//!
//! Series are generic over [`CoeffField`]; `F_p` and the exact rationals are
//! provided. Every identity here is an identity modulo `T^N`, so truncation
//! is explicit and there is no lazy evaluation.

mod field;
mod laurent;
mod power;
mod text;

pub use field::{CoeffField, FieldDescriptor, PrimeField, Rationals};
pub use laurent::LaurentSeries;
pub use power::{AbsR, PowerSeries, SeriesOp};
pub use text::SeriesJson;
