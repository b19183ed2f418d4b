//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use padicore::{Ball, ClopenSet, CoeffField, PadicNumber, PowerSeries, Prime, Qp};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Uniform in `[0, p^k)`, built digit by digit.
pub fn below_p_power(rng: &mut impl Rng, p: u64, k: u32) -> BigInt {
    let mut n = BigInt::zero();
    for _ in 0..k {
        n = n * p + rng.gen_range(0..p);
    }
    n
}

/// Uniform unit mod `p^k`.
pub fn unit_mod(rng: &mut impl Rng, p: u64, k: u32) -> BigInt {
    let head = rng.gen_range(1..p);
    below_p_power(rng, p, k - 1) * p + head
}

/// `p^v u + O(p^n)` with `v` drawn from `vals` and a random unit `u`.
pub fn padic_with_valuation(rng: &mut impl Rng, ctx: &Qp, v: i64, n: i64) -> PadicNumber {
    let u = unit_mod(rng, ctx.prime().get(), (n - v) as u32);
    ctx.from_parts(v, &u, n).unwrap()
}

pub fn random_padic(rng: &mut impl Rng, ctx: &Qp, vals: std::ops::RangeInclusive<i64>, n: i64) -> PadicNumber {
    let v = rng.gen_range(vals);
    padic_with_valuation(rng, ctx, v, n)
}

/// `x mod p^n` as a nonnegative integer, for `x` integral with precision at least `n`.
pub fn residue(x: &PadicNumber, n: u32) -> BigInt {
    let r = x.to_rational();
    let m = big_pow(x.prime().get(), n);
    let inv = mod_inv(r.denom(), &m);
    ((r.numer() * inv) % &m + &m) % &m
}

pub fn mod_inv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = num_integer::Integer::extended_gcd(&((a % m + m) % m), m);
    assert!(e.gcd.is_one(), "not invertible");
    (e.x % m + m) % m
}

pub fn random_series<F: CoeffField>(
    rng: &mut impl Rng,
    field: &F,
    n: usize,
    zero_constant: bool,
    coeff: impl Fn(&mut dyn rand::RngCore) -> F::Elem,
) -> PowerSeries<F> {
    let mut cs: Vec<F::Elem> = (0..n).map(|_| coeff(rng)).collect();
    if zero_constant && n > 0 {
        cs[0] = field.zero();
    }
    PowerSeries::new(field.clone(), cs)
}

pub fn small_rational(rng: &mut dyn rand::RngCore) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-3i64..=3)), BigInt::from(rng.gen_range(1i64..=3)))
}

/// Coefficients `c_0..=c_deg` of `f(g(y))` as `sum over alpha in E` of
/// `phi(alpha) y^d(alpha)`, where `E_j` is the set of `j`-tuples of
/// nonnegative integers, `phi(alpha) = a_j b_{alpha_1} ... b_{alpha_j}` and
/// `d(alpha) = alpha_1 + ... + alpha_j`. Requires `b_0 = 0`, so tuples with
/// `j > deg` cannot reach degree `<= deg` with a nonzero product and the
/// enumeration is finite.
pub fn compose_by_tuples<F: CoeffField>(field: &F, a: &[F::Elem], b: &[F::Elem], deg: usize) -> Vec<F::Elem> {
    let coeff = |s: &[F::Elem], i: usize| s.get(i).cloned().unwrap_or_else(|| field.zero());
    assert!(field.is_zero(&coeff(b, 0)));
    let mut out = vec![field.zero(); deg + 1];
    out[0] = coeff(a, 0);
    for j in 1..=deg {
        let aj = coeff(a, j);
        let mut alpha = Vec::with_capacity(j);
        tuples(j, deg, &mut alpha, &mut |alpha: &[usize]| {
            let d: usize = alpha.iter().sum();
            let beta = alpha.iter().fold(field.one(), |acc, &i| field.mul(&acc, &coeff(b, i)));
            out[d] = field.add(&out[d], &field.mul(&aj, &beta));
        });
    }
    out
}

/// Calls `visit` on every `j`-tuple of nonnegative integers with sum at most `budget`.
fn tuples(j: usize, budget: usize, alpha: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if alpha.len() == j {
        visit(alpha);
        return;
    }
    for x in 0..=budget {
        alpha.push(x);
        tuples(j, budget - x, alpha, visit);
        alpha.pop();
    }
}

pub fn random_ball(rng: &mut impl Rng, p: Prime, max_level: u32) -> Ball {
    let level = rng.gen_range(0..=max_level);
    let center = below_p_power(rng, p.get(), level);
    Ball::new(p, level, center)
}

pub fn random_clopen(rng: &mut impl Rng, p: Prime, max_level: u32) -> ClopenSet {
    let k = rng.gen_range(0..=4);
    let balls = (0..k).map(|_| random_ball(rng, p, max_level)).collect();
    ClopenSet::from_balls(p, balls).unwrap()
}

/// Membership bitmap of the residues mod `p^level` lying in `s`; needs
/// `level >= s.max_level()`.
pub fn residue_bitmap(s: &ClopenSet, level: u32) -> Vec<bool> {
    let p = s.prime().get();
    let size = p.pow(level);
    (0..size)
        .map(|r| {
            s.balls().iter().any(|b| {
                let m = p.pow(b.level());
                let c = b.center() % BigInt::from(m);
                BigInt::from(r % m) == (c + m) % m
            })
        })
        .collect()
}

pub fn bitmap_measure(bits: &[bool]) -> BigRational {
    let hits = bits.iter().filter(|&&b| b).count();
    BigRational::new(BigInt::from(hits), BigInt::from(bits.len()))
}

/// `max over subsets S of |sum_S f|`, by enumerating all `2^n` subsets.
pub fn subset_sum_sup(values: &[BigRational]) -> BigRational {
    let n = values.len();
    (0u32..1 << n)
        .map(|mask| {
            (0..n).filter(|i| mask >> i & 1 == 1).fold(BigRational::zero(), |acc, i| acc + &values[i]).abs()
        })
        .max()
        .unwrap_or_else(BigRational::zero)
}
