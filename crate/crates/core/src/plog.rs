//! The p-adic logarithm `log(1 + x) = sum_{j >= 1} (-1)^(j+1) x^j / j` on
//! `v(x) >= 1`, its rigorous truncation, and its inverse near 0.
//!
//! Term valuations satisfy `v(x^j / j) >= j v(x) - floor(log_p j)`, which is
//! nondecreasing in `j`, so a partial sum is exact modulo `p^N` once this
//! bound reaches `N`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::analytic::{min_valuation_above, PadicPolynomial};
use crate::error::{DivergenceWitness, Error, Result};
use crate::hensel::HenselProblem;
use crate::padic::{PadicNumber, PrecisionCap, Qp};
use crate::prime_field::{floor_log, Prime};

/// Smallest valuation with `|x| < p^(-1/(p-1))`: 1 for odd `p`, 2 for `p = 2`.
/// On this ball `log(1 + x)` is an isometry.
pub fn isometry_threshold(p: Prime) -> i64 {
    min_valuation_above(&BigRational::new(BigInt::from(1), BigInt::from(p.get() - 1)))
}

/// A point of the open unit ball `v(x) >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDomainPoint {
    x: PadicNumber,
}

impl LogDomainPoint {
    pub fn new(x: PadicNumber) -> Result<Self> {
        match x.exact_valuation() {
            Some(v) if v <= 0 => Err(Error::Divergent(DivergenceWitness {
                index: x.prime().get(),
                valuation: x.prime().get() as i64 * v - 1,
            })),
            None if x.abs_prec() < 1 => Err(Error::InsufficientPrecision { needed: 1, available: x.abs_prec() }),
            _ => Ok(LogDomainPoint { x }),
        }
    }

    pub fn value(&self) -> &PadicNumber {
        &self.x
    }

    pub fn log1p(&self, n: i64) -> Result<PadicNumber> {
        let x = &self.x;
        let p = x.prime();
        let Some(v) = x.exact_valuation() else {
            // every term has valuation >= the precision of x
            return Ok(PadicNumber::zero(p, n.min(x.abs_prec())));
        };
        let last = last_needed_index(p, n, v);
        let mut sum = PadicNumber::zero(p, n);
        let mut power = x.clone();
        for j in 1..=last {
            if j > 1 {
                power = power.mul(x)?;
            }
            let term = power.div_int(&BigInt::from(j))?;
            sum = if j % 2 == 1 { sum.add(&term)? } else { sum.sub(&term)? };
        }
        Ok(sum.truncate(n))
    }
}

/// Largest `j` with `j s - floor(log_p j) < n`; 0 when there is none.
fn last_needed_index(p: Prime, n: i64, s: i64) -> u64 {
    let mut j = 0u64;
    while (j + 1) as i64 * s - (floor_log(j + 1, p.get()) as i64) < n {
        j += 1;
    }
    j
}

/// `log(1 + x)` modulo `p^N` (and no more precisely than `x` is known).
///
/// For `v(x) <= 0` the series diverges; the error carries the term
/// `j = p`, whose valuation `p v(x) - 1` is not positive.
pub fn log1p(x: &PadicNumber, n: i64) -> Result<PadicNumber> {
    LogDomainPoint::new(x.clone())?.log1p(n)
}

/// `sum_{j <= J} (-1)^(j+1) x^j / j`, which agrees with `log(1 + x)` modulo
/// `p^N` whenever `v(x) >= s`. The degree is the largest `j` with
/// `j s - floor(log_p j) < N`, and at least 1.
pub fn truncate_to_poly(p: Prime, n: i64, s: i64) -> Result<PadicPolynomial> {
    if s < 1 {
        return Err(Error::domain(format!("no finite truncation of log(1 + x) on v(x) >= {s}")));
    }
    let degree = last_needed_index(p, n, s).max(1);
    let digits = n.max(1) + floor_log(degree, p.get()) as i64;
    let ctx = Qp::from_prime(p).with_cap(PrecisionCap::new(digits.max(1) as u32)?);
    let mut coeffs = vec![PadicNumber::zero(p, n.max(1))];
    for j in 1..=degree {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        coeffs.push(ctx.rational(sign, j, n.max(1))?);
    }
    PadicPolynomial::new(p, coeffs)
}

/// `x` with `log(1 + x) = z`, for `v(z) >= isometry_threshold(p)`.
///
/// Solves the truncated series by Hensel's lemma on `v(x) >= threshold`
/// and confirms the answer with [`log1p`]. The result has
/// `min(N, precision of z)` digits.
pub fn log_inverse(z: &PadicNumber, n: i64) -> Result<PadicNumber> {
    let p = z.prime();
    let t = isometry_threshold(p);
    if !z.is_in_ball(t) {
        return Err(Error::domain(format!("log is inverted only on v(z) >= {t} for p = {p}")));
    }
    let n = n.min(z.abs_prec());
    let poly = truncate_to_poly(p, n, t)?;
    let center = PadicNumber::zero(p, n.max(t));
    let problem = HenselProblem::new(poly, center, t, t)?;
    let x = problem.solve(z, n)?;
    let check = log1p(&x, n)?;
    if !check.agrees_with(z)? {
        return Err(Error::Internal(format!("log1p({x}) = {check} does not return {z}")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn qp(p: u64) -> Qp {
        Qp::new(p).unwrap()
    }

    fn int(p: u64, n: i64, prec: i64) -> PadicNumber {
        qp(p).integer(n, prec).unwrap()
    }

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn log_examples() {
        let l = log1p(&int(5, 5, 10), 3).unwrap();
        assert_eq!(l.reduce_mod(3).unwrap().representative().to_u64(), Some(55));
        // partial-sum oracle: 5 - 25 * 2^{-1} with 2^{-1} = 63 mod 125
        assert_eq!(2 * 63 % 125, 1);
        assert_eq!((5 - 25 * 63i64).rem_euclid(125), 55);
        assert_eq!(l.abs_prec(), 3);

        assert!(log1p(&int(7, 0, 10), 10).unwrap().is_zero());
        let m1 = log1p(&int(2, -2, 20), 20).unwrap();
        assert!(m1.is_zero());
        assert_eq!(m1.abs_prec(), 20);
    }

    #[test]
    fn divergence_witness() {
        let e = log1p(&int(5, 2, 10), 5).unwrap_err();
        assert_eq!(e, Error::Divergent(DivergenceWitness { index: 5, valuation: -1 }));
        let e = log1p(&qp(3).rational(1, 3, 10).unwrap(), 5).unwrap_err();
        assert_eq!(e, Error::Divergent(DivergenceWitness { index: 3, valuation: -4 }));
    }

    #[test]
    fn truncation_degrees() {
        let f = truncate_to_poly(prime(5), 3, 1).unwrap();
        assert_eq!(f.degree(), 2);
        assert!(f.coeff(2).unwrap().agrees_with(&qp(5).rational(-1, 2, 3).unwrap()).unwrap());
        assert_eq!(truncate_to_poly(prime(3), 1, 1).unwrap().degree(), 1);
        assert_eq!(truncate_to_poly(prime(7), 1, 1).unwrap().degree(), 1);
        for s in 4..8 {
            assert!(truncate_to_poly(prime(3), 4, s).unwrap().degree() <= 1);
        }
        assert!(matches!(truncate_to_poly(prime(3), 4, 0), Err(Error::Domain(_))));
        // bound oracle: every dropped term has valuation >= N
        for (p, n, s) in [(2u64, 20i64, 1i64), (2, 24, 2), (3, 30, 1), (5, 12, 2)] {
            let d = truncate_to_poly(prime(p), n, s).unwrap().degree() as i64;
            for j in (d + 1)..(d + 200) {
                let v_term = j * s - crate::prime_field::p_valuation_u64(j as u64, p) as i64;
                assert!(v_term >= n, "p={p} n={n} s={s} j={j}");
            }
        }
    }

    #[test]
    fn truncated_poly_matches_series() {
        let p = prime(3);
        let f = truncate_to_poly(p, 15, 1).unwrap();
        for a in [3i64, 6, 9, 27, -3, 120] {
            let x = int(3, a, 30);
            assert!(f.eval(&x).unwrap().agrees_with(&log1p(&x, 15).unwrap()).unwrap());
        }
    }

    #[test]
    fn inverse_examples() {
        let z = log1p(&int(5, 5, 10), 3).unwrap();
        let x = log_inverse(&z, 3).unwrap();
        assert!(x.agrees_with(&int(5, 5, 3)).unwrap());
        assert!(log_inverse(&int(5, 0, 10), 10).unwrap().is_zero());
        assert!(matches!(log_inverse(&int(2, 2, 10), 10), Err(Error::Domain(_))));
        assert!(matches!(log_inverse(&int(5, 1, 10), 10), Err(Error::Domain(_))));
        assert_eq!(isometry_threshold(prime(2)), 2);
        assert_eq!(isometry_threshold(prime(3)), 1);
    }

    fn small_point(p: u64, v: u32, u: i64, prec: i64) -> PadicNumber {
        int(p, (p as i64).pow(v) * u, prec)
    }

    proptest! {
        #[test]
        fn homomorphism(p in prop::sample::select(vec![2u64, 3, 5, 7]), vy in 1u32..4, vz in 1u32..4, a in 1i64..10_000, b in 1i64..10_000) {
            let (y, z) = (small_point(p, vy, a, 24), small_point(p, vz, b, 24));
            let yz = y.add(&z).unwrap().add(&y.mul(&z).unwrap()).unwrap();
            let lhs = log1p(&yz, 24).unwrap();
            let rhs = log1p(&y, 24).unwrap().add(&log1p(&z, 24).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs).unwrap());
        }

        #[test]
        fn isometry_and_contraction(p in prop::sample::select(vec![2u64, 3, 5, 7]), v in 1u32..5, a in 1i64..10_000) {
            prop_assume!(a % p as i64 != 0);
            let x = small_point(p, v, a, 30);
            let l = log1p(&x, 30).unwrap();
            prop_assert!(l.valuation().lower_bound() >= v as i64);
            if v as i64 >= isometry_threshold(prime(p)) {
                prop_assert_eq!(l.exact_valuation(), Some(v as i64));
            }
        }

        #[test]
        fn lipschitz_equality(p in prop::sample::select(vec![2u64, 3, 5]), a in 1i64..100_000, b in 1i64..100_000) {
            let t = isometry_threshold(prime(p)) as u32;
            let (y, z) = (small_point(p, t, a, 30), small_point(p, t, b, 30));
            let d = y.sub(&z).unwrap();
            prop_assume!(!d.is_zero());
            let dl = log1p(&y, 30).unwrap().sub(&log1p(&z, 30).unwrap()).unwrap();
            prop_assert_eq!(dl.exact_valuation(), d.exact_valuation());
        }

        #[test]
        fn power_law(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in 1i64..1000, n in 1u64..6) {
            let x = small_point(p, 1, a, 20);
            let one = int(p, 1, 20);
            let xn = x.add(&one).unwrap().pow(n).unwrap().sub(&one).unwrap();
            let lhs = log1p(&xn, 20).unwrap();
            let rhs = log1p(&x, 20).unwrap().mul_int(&BigInt::from(n)).unwrap();
            prop_assert!(lhs.agrees_with(&rhs).unwrap());
        }

        #[test]
        fn inverse_round_trips(p in prop::sample::select(vec![2u64, 3, 5, 7]), v in 0u32..3, a in 1i64..10_000) {
            let t = isometry_threshold(prime(p)) as u32;
            let x = small_point(p, t + v, a, 20);
            let z = log1p(&x, 20).unwrap();
            let back = log_inverse(&z, 20).unwrap();
            prop_assert!(back.agrees_with(&x).unwrap());
            prop_assert!(log1p(&back, 20).unwrap().agrees_with(&z).unwrap());
        }
    }
}
