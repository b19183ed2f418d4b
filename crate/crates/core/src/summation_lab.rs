//! Sums over finite index sets: sup, `l^r` and bounded-finite-sum (BFS)
//! norms, and the rearrangement identities (Fubini, sums of sums).
//!
//! On a finite index set every family is summable and vanishes at infinity,
//! so convergence criteria are automatic. What remains, and what is checked
//! here exactly, are the identities and norm inequalities they license.
//! Values are exact rationals under the usual absolute value, or p-adic
//! numbers under `|x|_p`.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::prime_field::Prime;

/// Largest family for which [`FiniteFamily::bfs_norm`] enumerates subsets.
pub const BFS_MAX_INDICES: usize = 20;

/// A value type with an exact norm.
pub trait NormedValue: Clone + Debug + PartialEq {
    /// Whether `N(x + y) <= max(N(x), N(y))`.
    const ULTRAMETRIC: bool;

    fn add(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn norm(&self) -> BigRational;
}

impl NormedValue for BigRational {
    const ULTRAMETRIC: bool = false;

    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn norm(&self) -> BigRational {
        self.abs()
    }
}

impl NormedValue for PadicNumber {
    const ULTRAMETRIC: bool = true;

    fn add(&self, other: &Self) -> Result<Self> {
        PadicNumber::add(self, other)
    }

    fn neg(&self) -> Self {
        PadicNumber::neg(self)
    }

    /// `p^-v`; values that are zero to precision count as 0.
    fn norm(&self) -> BigRational {
        PadicNumber::norm(self)
    }
}

/// `f : X -> V` on a finite labelled index set.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFamily<V: NormedValue> {
    labels: Vec<String>,
    values: Vec<V>,
    zero: V,
}

/// `r` in `||f||_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(u32),
    Infinity,
}

/// An `l^r` norm kept without roots: the sup itself, or `||f||_r^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LrNorm {
    Sup(BigRational),
    Power { r: u32, rth_power: BigRational },
}

impl LrNorm {
    /// Exact comparison of the underlying norms: `A^(1/r)` against
    /// `B^(1/q)` is decided by comparing `A^q` with `B^r`.
    pub fn cmp_norm(&self, other: &LrNorm) -> Ordering {
        match (self, other) {
            (LrNorm::Sup(a), LrNorm::Sup(b)) => a.cmp(b),
            (LrNorm::Sup(s), LrNorm::Power { r, rth_power }) => pow(s, *r).cmp(rth_power),
            (LrNorm::Power { r, rth_power }, LrNorm::Sup(s)) => rth_power.cmp(&pow(s, *r)),
            (LrNorm::Power { r, rth_power: a }, LrNorm::Power { r: q, rth_power: b }) => pow(a, *q).cmp(&pow(b, *r)),
        }
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// Best finite partial sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BfsReport {
    pub value: BigRational,
    /// Indices of a subset attaining the value.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FubiniReport<V> {
    pub row_first: V,
    pub column_first: V,
    pub direct: V,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport<V> {
    pub block_sums: Vec<V>,
    pub sum_of_blocks: V,
    pub direct: V,
    pub equal: bool,
}

impl<V: NormedValue> FiniteFamily<V> {
    /// `zero` is the additive identity used for empty sums.
    pub fn new(labels: Vec<String>, values: Vec<V>, zero: V) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::domain(format!("{} labels for {} values", labels.len(), values.len())));
        }
        Ok(FiniteFamily { labels, values, zero })
    }

    /// Values labelled `0, 1, ...`.
    pub fn from_values(values: Vec<V>, zero: V) -> Self {
        let labels = (0..values.len()).map(|i| i.to_string()).collect();
        FiniteFamily { labels, values, zero }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_ultrametric(&self) -> bool {
        V::ULTRAMETRIC
    }

    pub fn sum(&self) -> Result<V> {
        sum_all(&self.zero, self.values.iter())
    }

    pub fn sup_norm(&self) -> BigRational {
        self.values.iter().map(V::norm).max().unwrap_or_else(BigRational::zero)
    }

    /// `sum N(f(x))^r`.
    pub fn lr_power(&self, r: u32) -> BigRational {
        self.values.iter().map(|v| pow(&v.norm(), r)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// `sum N(f(x))`.
    pub fn absolute_sum(&self) -> BigRational {
        self.lr_power(1)
    }

    pub fn norm(&self, r: Exponent) -> LrNorm {
        match r {
            Exponent::Infinity => LrNorm::Sup(self.sup_norm()),
            Exponent::Finite(r) => LrNorm::Power { r, rth_power: self.lr_power(r) },
        }
    }

    pub fn norms(&self, exponents: &[Exponent]) -> Vec<LrNorm> {
        exponents.iter().map(|&r| self.norm(r)).collect()
    }

    /// `sup_A N(sum_{x in A} f(x))` over all subsets, by a Gray-code walk
    /// that adds or removes one value per step.
    pub fn bfs_norm(&self) -> Result<BfsReport> {
        let n = self.values.len();
        if n > BFS_MAX_INDICES {
            return Err(Error::GuardExceeded { size: 1u128 << n, limit: 1u128 << BFS_MAX_INDICES });
        }
        let negated: Vec<V> = self.values.iter().map(V::neg).collect();
        let mut current = self.zero.clone();
        let mut best = BigRational::zero();
        let mut best_mask = 0u32;
        let mut mask = 0u32;
        for step in 1u32..(1u32 << n) {
            let bit = step.trailing_zeros() as usize;
            current = if mask & (1 << bit) == 0 {
                current.add(&self.values[bit])?
            } else {
                current.add(&negated[bit])?
            };
            mask ^= 1 << bit;
            let norm = current.norm();
            if norm > best {
                best = norm;
                best_mask = mask;
            }
        }
        let witness = (0..n).filter(|i| best_mask & (1 << i) != 0).collect();
        Ok(BfsReport { value: best, witness })
    }

    /// Sums each block, then the block sums, and compares with the direct
    /// total. The blocks must partition the indices.
    pub fn partition_check(&self, blocks: &[Vec<usize>]) -> Result<PartitionReport<V>> {
        let mut seen = vec![false; self.values.len()];
        for &i in blocks.iter().flatten() {
            let slot = seen.get_mut(i).ok_or_else(|| Error::domain(format!("index {i} out of range")))?;
            if *slot {
                return Err(Error::domain(format!("index {i} lies in two blocks")));
            }
            *slot = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::domain(format!("index {missing} lies in no block")));
        }
        let block_sums =
            blocks.iter().map(|b| sum_all(&self.zero, b.iter().map(|&i| &self.values[i]))).collect::<Result<Vec<_>>>()?;
        let sum_of_blocks = sum_all(&self.zero, block_sums.iter())?;
        let direct = self.sum()?;
        let equal = sum_of_blocks == direct;
        Ok(PartitionReport { block_sums, sum_of_blocks, direct, equal })
    }
}

fn sum_all<'a, V: NormedValue + 'a>(zero: &V, mut values: impl Iterator<Item = &'a V>) -> Result<V> {
    values.try_fold(zero.clone(), |acc, v| acc.add(v))
}

/// Row-by-row, column-by-column and cell-by-cell totals of a rectangular grid.
pub fn fubini_check<V: NormedValue>(rows: &[Vec<V>], zero: &V) -> Result<FubiniReport<V>> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::domain("grid rows have different lengths"));
    }
    let row_sums = rows.iter().map(|r| sum_all(zero, r.iter())).collect::<Result<Vec<_>>>()?;
    let row_first = sum_all(zero, row_sums.iter())?;
    let col_sums = (0..width).map(|j| sum_all(zero, rows.iter().map(|r| &r[j]))).collect::<Result<Vec<_>>>()?;
    let column_first = sum_all(zero, col_sums.iter())?;
    let direct = sum_all(zero, rows.iter().flatten())?;
    let equal = row_first == direct && column_first == direct;
    Ok(FubiniReport { row_first, column_first, direct, equal })
}

impl FiniteFamily<BigRational> {
    pub fn reals(values: Vec<BigRational>) -> Self {
        FiniteFamily::from_values(values, BigRational::zero())
    }

    pub fn from_integers(values: &[i64]) -> Self {
        FiniteFamily::reals(values.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
    }
}

impl FiniteFamily<PadicNumber> {
    /// A p-adic family; its empty sum is zero to the least precision present.
    pub fn padic(p: Prime, values: Vec<PadicNumber>) -> Result<Self> {
        for v in &values {
            p.check_same(v.prime())?;
        }
        let prec = values.iter().map(PadicNumber::abs_prec).min().unwrap_or(i64::from(i32::MAX));
        Ok(FiniteFamily::from_values(values, PadicNumber::zero(p, prec)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Qp;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn padic_family(p: u64, vs: &[i64], prec: i64) -> FiniteFamily<PadicNumber> {
        let ctx = Qp::new(p).unwrap();
        FiniteFamily::padic(ctx.prime(), vs.iter().map(|&v| ctx.integer(v, prec).unwrap()).collect()).unwrap()
    }

    /// Subset sums by direct enumeration of bitmasks.
    fn bfs_oracle<V: NormedValue>(f: &FiniteFamily<V>) -> BigRational {
        let n = f.len();
        (0u32..(1 << n))
            .map(|mask| {
                let chosen = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &f.values()[i]);
                sum_all(&f.zero, chosen).unwrap().norm()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn norm_examples() {
        let f = FiniteFamily::from_integers(&[1, 1]);
        assert_eq!(f.lr_power(1), q(2));
        assert_eq!(f.lr_power(2), q(2));
        assert_eq!(f.sup_norm(), q(1));
        // ||f||_2 <= ||f||_1 as 2^1 <= 2^2
        assert_eq!(f.norm(Exponent::Finite(2)).cmp_norm(&f.norm(Exponent::Finite(1))), Ordering::Less);

        let single = FiniteFamily::reals(vec![BigRational::new((-3).into(), 4.into())]);
        let three_quarters = BigRational::new(3.into(), 4.into());
        for r in 1..5 {
            assert_eq!(single.norm(Exponent::Finite(r)).cmp_norm(&LrNorm::Sup(three_quarters.clone())), Ordering::Equal);
        }
        assert_eq!(single.bfs_norm().unwrap().value, three_quarters);

        assert_eq!(padic_family(5, &[5, 10, 1], 10).sup_norm(), q(1));
    }

    #[test]
    fn bfs_examples() {
        let f = FiniteFamily::from_integers(&[1, -1, 1]);
        let r = f.bfs_norm().unwrap();
        assert_eq!(r.value, q(2));
        assert_eq!(r.witness, vec![0, 2]);
        assert_eq!(bfs_oracle(&f), q(2));

        let g = padic_family(5, &[5, 10, 1], 10);
        assert_eq!(g.bfs_norm().unwrap().value, q(1));
        assert_eq!(bfs_oracle(&g), q(1));

        assert_eq!(FiniteFamily::from_integers(&[0, 0, 0]).bfs_norm().unwrap().value, q(0));
        assert_eq!(FiniteFamily::from_integers(&[]).bfs_norm().unwrap().value, q(0));
        let big = FiniteFamily::from_integers(&[1; 21]);
        assert!(matches!(big.bfs_norm(), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn fubini_examples() {
        let grid = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        let r = fubini_check(&grid, &q(0)).unwrap();
        assert_eq!((r.row_first.clone(), r.column_first.clone(), r.direct.clone()), (q(10), q(10), q(10)));
        assert!(r.equal);
        let cell = fubini_check(&[vec![q(7)]], &q(0)).unwrap();
        assert_eq!(cell.direct, q(7));
        assert!(fubini_check(&[vec![q(1)], vec![q(1), q(2)]], &q(0)).is_err());
    }

    #[test]
    fn partition_examples() {
        let f = FiniteFamily::from_integers(&[1, 2, 3, 4]);
        let r = f.partition_check(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(r.block_sums, vec![q(3), q(7)]);
        assert_eq!(r.direct, q(10));
        assert!(r.equal);
        let singles = f.partition_check(&[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(singles.sum_of_blocks, q(10));
        assert!(f.partition_check(&[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(f.partition_check(&[vec![0, 1], vec![2]]).is_err());
        assert!(f.partition_check(&[vec![0, 1, 2, 3, 4]]).is_err());

        let g = padic_family(3, &[1, 3, 9, 27, 2, -5], 12);
        assert!(g.partition_check(&[vec![5, 0], vec![2, 4, 1], vec![3]]).unwrap().equal);
    }

    fn arb_real() -> impl Strategy<Value = FiniteFamily<BigRational>> {
        proptest::collection::vec((-50i64..50, 1i64..6), 0..9)
            .prop_map(|vs| FiniteFamily::reals(vs.into_iter().map(|(a, b)| BigRational::new(a.into(), b.into())).collect()))
    }

    fn arb_padic() -> impl Strategy<Value = FiniteFamily<PadicNumber>> {
        (prop::sample::select(vec![2u64, 3, 5]), proptest::collection::vec(-500i64..500, 0..9))
            .prop_map(|(p, vs)| padic_family(p, &vs, 12))
    }

    proptest! {
        #[test]
        fn real_bfs_bounds(f in arb_real()) {
            let bfs = f.bfs_norm().unwrap().value;
            prop_assert_eq!(&bfs, &bfs_oracle(&f));
            prop_assert!(f.sup_norm() <= bfs);
            prop_assert!(f.absolute_sum() <= q(2) * &bfs);
        }

        #[test]
        fn padic_bfs_is_sup(f in arb_padic()) {
            let bfs = f.bfs_norm().unwrap().value;
            prop_assert_eq!(&bfs, &bfs_oracle(&f));
            prop_assert_eq!(bfs, f.sup_norm());
        }

        #[test]
        fn lr_monotone(f in arb_real(), q1 in 1u32..5, extra in 0u32..4) {
            let r = q1 + extra;
            let (nq, nr) = (f.norm(Exponent::Finite(q1)), f.norm(Exponent::Finite(r)));
            prop_assert_ne!(nr.cmp_norm(&nq), Ordering::Greater);
            prop_assert_ne!(f.norm(Exponent::Infinity).cmp_norm(&nr), Ordering::Greater);
        }

        #[test]
        fn grid_and_partition_identities(p in prop::sample::select(vec![2u64, 3, 5]), cells in proptest::collection::vec(-1000i64..1000, 16), cut in 0usize..16) {
            let ctx = Qp::new(p).unwrap();
            let vals: Vec<PadicNumber> = cells.iter().map(|&c| ctx.rational(c, 1 + c.rem_euclid(4), 10).unwrap()).collect();
            let grid: Vec<Vec<PadicNumber>> = vals.chunks(4).map(<[_]>::to_vec).collect();
            let zero = PadicNumber::zero(ctx.prime(), 100);
            prop_assert!(fubini_check(&grid, &zero).unwrap().equal);
            let fam = FiniteFamily::padic(ctx.prime(), vals).unwrap();
            let blocks = vec![(0..cut).collect::<Vec<_>>(), (cut..16).rev().collect()];
            prop_assert!(fam.partition_check(&blocks).unwrap().equal);
            let reals: Vec<Vec<BigRational>> = cells.chunks(4).map(|r| r.iter().map(|&c| q(c)).collect()).collect();
            prop_assert!(fubini_check(&reals, &q(0)).unwrap().equal);
        }
    }
}
