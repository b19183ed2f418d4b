//! Truncated p-adic arithmetic, formal power series, Hensel lifting,
//! the p-adic logarithm, clopen subsets of Z_p and a small summation lab.

pub mod analytic;
pub mod cli;
pub mod clopen_measure;
pub mod error;
pub mod ext;
pub mod formal_series;
pub mod hensel;
pub mod padic;
pub mod plog;
pub mod prime_field;
pub mod summation_lab;
mod terms;

pub use analytic::{PadicPolynomial, ValuationGrowthRule};
pub use clopen_measure::{Ball, ClopenSet};
pub use error::{Error, Result};
pub use ext::{ExtInt, Valuation};
pub use hensel::HenselProblem;
pub use formal_series::{CoeffField, LaurentSeries, PowerSeries, PrimeField, Rationals};
pub use padic::{PadicNumber, PrecisionCap, Qp, ResidueClass};
pub use prime_field::{FpElement, Prime};

/// Power series over `F_p`.
pub type FpSeries = PowerSeries<PrimeField>;
/// Power series over the rationals.
pub type QSeries = PowerSeries<Rationals>;
/// Laurent series over `F_p`.
pub type FpLaurent = LaurentSeries<PrimeField>;
/// Laurent series over the rationals.
pub type QLaurent = LaurentSeries<Rationals>;
/// A finite family of exact rationals under the usual absolute value.
pub type RealFamily = summation_lab::FiniteFamily<num_rational::BigRational>;
/// A finite family of p-adic numbers under `|x|_p`.
pub type PadicFamily = summation_lab::FiniteFamily<PadicNumber>;
