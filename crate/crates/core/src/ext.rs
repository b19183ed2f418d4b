//! Extended integers used for valuations and orders.

use std::cmp::Ordering;
use std::fmt;

/// An integer or `+∞`. Orders as `Finite(_) < Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtInt {
    Finite(i64),
    Infinite,
}

impl ExtInt {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            ExtInt::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtInt::Infinite)
    }

    pub fn plus(self, n: i64) -> ExtInt {
        match self {
            ExtInt::Finite(v) => ExtInt::Finite(v + n),
            ExtInt::Infinite => ExtInt::Infinite,
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::Finite(v) => write!(f, "{v}"),
            ExtInt::Infinite => write!(f, "inf"),
        }
    }
}

/// Valuation (or order) of a truncated value: either known exactly, or only
/// bounded below because every known digit vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(i64),
    AtLeast(i64),
}

impl Valuation {
    pub fn exact(self) -> Option<i64> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// The largest integer certainly below or equal to the true valuation.
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// `true` when the valuation is certainly `>= n`.
    pub fn is_at_least(self, n: i64) -> bool {
        self.lower_bound() >= n
    }

    /// Compare two valuations where that is decidable. `None` when either
    /// side is only a lower bound and the bounds do not settle the question.
    pub fn partial_cmp_known(self, other: Valuation) -> Option<Ordering> {
        match (self, other) {
            (Valuation::Exact(a), Valuation::Exact(b)) => Some(a.cmp(&b)),
            (Valuation::Exact(a), Valuation::AtLeast(b)) if a < b => Some(Ordering::Less),
            (Valuation::AtLeast(a), Valuation::Exact(b)) if a > b => Some(Ordering::Greater),
            _ => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_int_ordering() {
        assert!(ExtInt::Finite(i64::MAX) < ExtInt::Infinite);
        assert!(ExtInt::Finite(-3) < ExtInt::Finite(2));
        assert_eq!(ExtInt::Infinite.plus(5), ExtInt::Infinite);
    }

    #[test]
    fn valuation_comparisons() {
        assert_eq!(
            Valuation::Exact(1).partial_cmp_known(Valuation::AtLeast(4)),
            Some(Ordering::Less)
        );
        assert_eq!(Valuation::Exact(5).partial_cmp_known(Valuation::AtLeast(4)), None);
        assert!(Valuation::AtLeast(8).is_at_least(8));
        assert_eq!(Valuation::AtLeast(8).to_string(), ">= 8");
    }
}
