//! Clopen subsets of `Z_p` as finite unions of balls `c + p^j Z_p`, with the
//! Haar measure that gives each level-`j` ball mass `p^-j`.
//!
//! Sets are kept canonical: balls are pairwise disjoint, no ball contains
//! another, no `p` siblings are all present (they merge into their parent),
//! and the list is sorted by `(level, center)`. Equal sets therefore have
//! equal representations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicNumber, ResidueClass};
use crate::prime_field::Prime;

/// Largest `p^j` that [`residue_count`] will enumerate.
pub const RESIDUE_COUNT_GUARD: u128 = 10_000_000;

/// `{x in Z_p : x ≡ center mod p^level}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    // field order gives the canonical (level, center) sort
    level: u32,
    center: BigInt,
    p: Prime,
}

impl Ball {
    pub fn new(p: Prime, level: u32, center: impl Into<BigInt>) -> Self {
        let center = center.into().mod_floor(&p.pow(level));
        Ball { level, center, p }
    }

    pub fn from_residue(r: &ResidueClass) -> Self {
        Ball::new(r.prime(), r.level(), r.representative().clone())
    }

    /// `Z_p` itself.
    pub fn whole(p: Prime) -> Self {
        Ball::new(p, 0, 0)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn center(&self) -> &BigInt {
        &self.center
    }

    pub fn residue(&self) -> ResidueClass {
        ResidueClass::new(self.p, self.level, &self.center)
    }

    /// The `p` sub-balls of level `level + 1`.
    pub fn split(&self) -> Vec<Ball> {
        let step = self.p.pow(self.level);
        (0..self.p.get())
            .map(|d| Ball::new(self.p, self.level + 1, &self.center + &step * BigInt::from(d)))
            .collect()
    }

    /// The ball one level up; `None` for `Z_p`.
    pub fn parent(&self) -> Option<Ball> {
        (self.level > 0).then(|| Ball::new(self.p, self.level - 1, self.center.clone()))
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        other.level >= self.level && other.center.mod_floor(&self.p.pow(self.level)) == self.center
    }

    /// Membership of a p-adic integer known to at least `level` digits.
    pub fn contains(&self, x: &PadicNumber) -> Result<bool> {
        self.p.check_same(x.prime())?;
        let r = x.reduce_mod(self.level)?;
        Ok(*r.representative() == self.center)
    }

    /// The smaller of two nested balls, or `None` when they are disjoint.
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        if self.contains_ball(other) {
            Some(other.clone())
        } else if other.contains_ball(self) {
            Some(self.clone())
        } else {
            None
        }
    }

    pub fn translate(&self, c: &BigInt) -> Ball {
        Ball::new(self.p, self.level, &self.center + c)
    }

    /// Haar measure `p^-level`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.p.pow(self.level))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.center, self.p, self.level)
    }
}

/// A canonical finite union of disjoint balls in `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    p: Prime,
    balls: Vec<Ball>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

impl ClopenSet {
    pub fn empty(p: Prime) -> Self {
        ClopenSet { p, balls: Vec::new() }
    }

    pub fn whole(p: Prime) -> Self {
        ClopenSet { p, balls: vec![Ball::whole(p)] }
    }

    pub fn from_ball(b: Ball) -> Self {
        ClopenSet { p: b.p, balls: vec![b] }
    }

    /// Union of arbitrary (possibly overlapping) balls.
    pub fn from_balls(p: Prime, balls: Vec<Ball>) -> Result<Self> {
        for b in &balls {
            p.check_same(b.p)?;
        }
        Ok(ClopenSet { p, balls: canonicalize(balls) })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Deepest level among the balls (0 for the empty set).
    pub fn max_level(&self) -> u32 {
        self.balls.iter().map(|b| b.level).max().unwrap_or(0)
    }

    pub fn contains(&self, x: &PadicNumber) -> Result<bool> {
        for b in &self.balls {
            if b.contains(x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn apply(op: SetOp, a: &ClopenSet, b: &ClopenSet) -> Result<ClopenSet> {
        match op {
            SetOp::Union => a.union(b),
            SetOp::Intersect => a.intersect(b),
            SetOp::Difference => a.difference(b),
        }
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.p.check_same(other.p)?;
        let balls = self.balls.iter().chain(&other.balls).cloned().collect();
        Ok(ClopenSet { p: self.p, balls: canonicalize(balls) })
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.p.check_same(other.p)?;
        let balls = self
            .balls
            .iter()
            .flat_map(|a| other.balls.iter().filter_map(move |b| a.intersect(b)))
            .collect();
        Ok(ClopenSet { p: self.p, balls: canonicalize(balls) })
    }

    /// `Z_p` minus the set.
    pub fn complement(&self) -> ClopenSet {
        let mut out = Vec::new();
        complement_within(&Ball::whole(self.p), &self.balls, &mut out);
        ClopenSet { p: self.p, balls: canonicalize(out) }
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.p.check_same(other.p)?;
        self.intersect(&other.complement())
    }

    /// `S + c`, ball by ball.
    pub fn translate(&self, c: &BigInt) -> ClopenSet {
        ClopenSet { p: self.p, balls: canonicalize(self.balls.iter().map(|b| b.translate(c)).collect()) }
    }

    /// `sum p^-level` over the balls.
    pub fn haar_measure(&self) -> BigRational {
        self.balls.iter().map(Ball::measure).fold(BigRational::zero(), |a, b| a + b)
    }

    /// The measure under a general normalization: `N^-level` per ball.
    pub fn measure_with(&self, norm: &HausdorffNormalization) -> BigRational {
        self.balls.iter().map(|b| norm.ball_measure(b.level)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// The same set written with every ball refined to `level` (at least the
    /// deepest level present).
    pub fn refine_to(&self, level: u32) -> Vec<Ball> {
        let mut out = Vec::new();
        for b in &self.balls {
            let mut layer = vec![b.clone()];
            for _ in b.level..level {
                layer = layer.iter().flat_map(Ball::split).collect();
            }
            out.extend(layer);
        }
        out.sort();
        out
    }

    pub fn to_pretty(&self) -> String {
        let inner: Vec<String> = self.balls.iter().map(Ball::to_string).collect();
        format!("{{{}}} in Z_{}", inner.join(", "), self.p)
    }

    pub fn parse_pretty(s: &str) -> Result<Self> {
        let (body, ring) =
            s.trim().rsplit_once(" in ").ok_or_else(|| Error::parse("expected `{...} in Z_p`"))?;
        let p: u64 = ring
            .trim()
            .strip_prefix("Z_")
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::parse(format!("expected Z_p, got {ring:?}")))?;
        let p = Prime::new(p)?;
        let inner = body
            .trim()
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| Error::parse("expected braces around the balls"))?;
        let mut balls = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (c, m) = part.split_once(" mod ").ok_or_else(|| Error::parse(format!("bad ball {part:?}")))?;
            let center: BigInt = c.trim().parse().map_err(|_| Error::parse(format!("bad center {c:?}")))?;
            let (base, level) = m.trim().split_once('^').ok_or_else(|| Error::parse(format!("bad modulus {m:?}")))?;
            if base.trim().parse::<u64>().ok() != Some(p.get()) {
                return Err(Error::parse(format!("modulus base {base:?} differs from {p}")));
            }
            let level: u32 = level.trim().parse().map_err(|_| Error::parse(format!("bad level {level:?}")))?;
            balls.push(Ball::new(p, level, center));
        }
        ClopenSet::from_balls(p, balls)
    }

    pub fn to_json_repr(&self) -> ClopenJson {
        ClopenJson {
            p: self.p.get(),
            balls: self
                .balls
                .iter()
                .map(|b| BallJson {
                    level: b.level,
                    center: match b.center.to_u64() {
                        Some(c) => serde_json::Value::from(c),
                        None => serde_json::Value::from(b.center.to_string()),
                    },
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ClopenJson = serde_json::from_str(s).map_err(|e| Error::parse(e.to_string()))?;
        let p = Prime::new(j.p)?;
        let mut balls = Vec::with_capacity(j.balls.len());
        for b in &j.balls {
            let center: BigInt = match &b.center {
                serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| Error::parse("bad center"))?,
                serde_json::Value::String(s) => s.parse().map_err(|_| Error::parse("bad center"))?,
                other => return Err(Error::parse(format!("bad center {other}"))),
            };
            balls.push(Ball::new(p, b.level, center));
        }
        ClopenSet::from_balls(p, balls)
    }

    /// JSON when the text starts with `{"`, pretty form otherwise.
    pub fn parse_any(s: &str) -> Result<Self> {
        let t = s.trim_start();
        if t.starts_with("{\"") || t.starts_with("{ \"") {
            ClopenSet::from_json(s)
        } else {
            ClopenSet::parse_pretty(s)
        }
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pretty())
    }
}

/// `{"p":5,"balls":[{"level":1,"center":0}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClopenJson {
    pub p: u64,
    pub balls: Vec<BallJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallJson {
    pub level: u32,
    pub center: serde_json::Value,
}

fn complement_within(ball: &Ball, set: &[Ball], out: &mut Vec<Ball>) {
    let mut meets = false;
    for b in set {
        if b.contains_ball(ball) {
            return;
        }
        meets |= ball.contains_ball(b);
    }
    if !meets {
        out.push(ball.clone());
        return;
    }
    let inside: Vec<Ball> = set.iter().filter(|b| ball.contains_ball(b)).cloned().collect();
    for child in ball.split() {
        complement_within(&child, &inside, out);
    }
}

/// Drops balls contained in others, merges complete sibling groups, sorts.
fn canonicalize(mut balls: Vec<Ball>) -> Vec<Ball> {
    balls.sort();
    balls.dedup();
    let mut kept: Vec<Ball> = Vec::with_capacity(balls.len());
    for b in balls {
        if !kept.iter().any(|k| k.contains_ball(&b)) {
            kept.push(b);
        }
    }
    let Some(max_level) = kept.iter().map(|b| b.level).max() else {
        return kept;
    };
    let mut by_level: BTreeMap<u32, Vec<Ball>> = BTreeMap::new();
    for b in kept {
        by_level.entry(b.level).or_default().push(b);
    }
    for level in (1..=max_level).rev() {
        let Some(layer) = by_level.remove(&level) else { continue };
        let mut groups: BTreeMap<BigInt, Vec<Ball>> = BTreeMap::new();
        let p = layer[0].p;
        for b in layer {
            groups.entry(b.center.mod_floor(&p.pow(level - 1))).or_default().push(b);
        }
        let mut stay = Vec::new();
        for (_, group) in groups {
            if group.len() as u64 == p.get() {
                let parent = group[0].parent().expect("level >= 1");
                by_level.entry(level - 1).or_default().push(parent);
            } else {
                stay.extend(group);
            }
        }
        by_level.insert(level, stay);
    }
    let mut out: Vec<Ball> = by_level.into_values().flatten().collect();
    out.sort();
    out
}

/// Normalization `rho_1^alpha = 1/N` of the Hausdorff measure: a level-`j`
/// ball has measure `rho_1^(alpha j) = N^-j`. For `Q_p`, `N = p` and
/// `rho_1 = 1/p`, so `alpha = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HausdorffNormalization {
    /// Size of the residue field.
    pub residue_size: u64,
    /// `1/rho_1`, the ratio between consecutive ball radii.
    pub radius_ratio: u64,
}

impl HausdorffNormalization {
    pub fn padic(p: Prime) -> Self {
        HausdorffNormalization { residue_size: p.get(), radius_ratio: p.get() }
    }

    /// `alpha = log N / log(1/rho_1)` when that is rational with both sides
    /// powers of a common base; `None` means it stays symbolic.
    pub fn alpha(&self) -> Option<BigRational> {
        let (n, r) = (self.residue_size, self.radius_ratio);
        if n < 2 || r < 2 {
            return None;
        }
        let base = (2..=n.min(r)).find(|b| is_power_of(n, *b) && is_power_of(r, *b))?;
        Some(BigRational::new(BigInt::from(ilog(n, base)), BigInt::from(ilog(r, base))))
    }

    pub fn ball_measure(&self, level: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.residue_size).pow(level))
    }
}

fn is_power_of(mut n: u64, b: u64) -> bool {
    while n.is_multiple_of(b) {
        n /= b;
    }
    n == 1
}

fn ilog(mut n: u64, b: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= b;
        k += 1;
    }
    k
}

/// `|Z_p / p^j Z_p| = p^j`, counted by walking the split tree to depth `j`
/// and checked against the closed form.
pub fn residue_count(p: Prime, j: u32) -> Result<u128> {
    let expected = (p.get() as u128).checked_pow(j).unwrap_or(u128::MAX);
    if expected > RESIDUE_COUNT_GUARD {
        return Err(Error::GuardExceeded { size: expected, limit: RESIDUE_COUNT_GUARD });
    }
    fn leaves(b: &Ball, depth: u32) -> u128 {
        if b.level == depth {
            1
        } else {
            b.split().iter().map(|c| leaves(c, depth)).sum()
        }
    }
    let counted = leaves(&Ball::whole(p), j);
    if counted != expected {
        return Err(Error::Internal(format!("split tree has {counted} leaves, expected {expected}")));
    }
    Ok(counted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn set(p: u64, balls: &[(u32, i64)]) -> ClopenSet {
        let p = prime(p);
        ClopenSet::from_balls(p, balls.iter().map(|&(l, c)| Ball::new(p, l, c)).collect()).unwrap()
    }

    /// Membership of every residue mod `p^level`.
    fn bitmap(s: &ClopenSet, level: u32) -> Vec<bool> {
        let m = s.prime().get().pow(level);
        (0..m)
            .map(|r| s.balls().iter().any(|b| b.contains_ball(&Ball::new(s.prime(), level, r))))
            .collect()
    }

    #[test]
    fn split_examples() {
        let p3 = prime(3);
        let parts = Ball::whole(p3).split();
        assert_eq!(parts, vec![Ball::new(p3, 1, 0), Ball::new(p3, 1, 1), Ball::new(p3, 1, 2)]);
        let p2 = prime(2);
        assert_eq!(Ball::new(p2, 1, 1).split(), vec![Ball::new(p2, 2, 1), Ball::new(p2, 2, 3)]);
        let b = Ball::new(prime(5), 2, 7);
        assert_eq!(ClopenSet::from_balls(prime(5), b.split()).unwrap(), ClopenSet::from_ball(b));
    }

    #[test]
    fn boolean_examples() {
        let a = set(5, &[(1, 0)]);
        assert_eq!(a.complement(), set(5, &[(1, 1), (1, 2), (1, 3), (1, 4)]));
        assert_eq!(a.union(&a.complement()).unwrap(), ClopenSet::whole(prime(5)));
        let (e, f) = (set(2, &[(1, 0)]), set(2, &[(2, 0)]));
        assert_eq!(e.intersect(&f).unwrap(), f);
        assert_eq!(e.difference(&f).unwrap(), set(2, &[(2, 2)]));
        assert!(matches!(a.union(&e), Err(Error::PrimeMismatch(5, 2))));
        assert_eq!(ClopenSet::empty(prime(3)).complement(), ClopenSet::whole(prime(3)));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(ClopenSet::whole(prime(7)).haar_measure(), BigRational::one());
        assert_eq!(set(5, &[(1, 0)]).complement().haar_measure(), BigRational::new(4.into(), 5.into()));
        assert_eq!(set(3, &[(4, 11)]).haar_measure(), BigRational::new(1.into(), 81.into()));
        let norm = HausdorffNormalization::padic(prime(5));
        assert_eq!(norm.alpha(), Some(BigRational::one()));
        let s = set(5, &[(1, 0), (2, 7)]);
        assert_eq!(s.measure_with(&norm), s.haar_measure());
        let q = HausdorffNormalization { residue_size: 4, radius_ratio: 2 };
        assert_eq!(q.alpha(), Some(BigRational::from_integer(2.into())));
        assert_eq!(HausdorffNormalization { residue_size: 3, radius_ratio: 2 }.alpha(), None);
    }

    #[test]
    fn residue_counts() {
        assert_eq!(residue_count(prime(2), 5), Ok(32));
        assert_eq!(residue_count(prime(7), 0), Ok(1));
        assert_eq!(residue_count(prime(3), 3), Ok(27));
        assert!(matches!(residue_count(prime(10007), 2), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn text_forms() {
        let s = set(5, &[(2, 7), (1, 0)]);
        assert_eq!(s.to_pretty(), "{0 mod 5^1, 7 mod 5^2} in Z_5");
        assert_eq!(s.to_json(), r#"{"p":5,"balls":[{"level":1,"center":0},{"level":2,"center":7}]}"#);
        assert_eq!(ClopenSet::parse_any(&s.to_pretty()).unwrap(), s);
        assert_eq!(ClopenSet::parse_any(&s.to_json()).unwrap(), s);
        assert_eq!(ClopenSet::empty(prime(3)).to_pretty(), "{} in Z_3");
        assert_eq!(ClopenSet::parse_pretty("{} in Z_3").unwrap(), ClopenSet::empty(prime(3)));
        assert!(ClopenSet::parse_pretty("{1 mod 3^2} in Z_5").is_err());
    }

    #[test]
    fn membership() {
        let ctx = crate::padic::Qp::new(5).unwrap();
        let s = set(5, &[(2, 7)]);
        assert!(s.contains(&ctx.integer(32, 5).unwrap()).unwrap());
        assert!(!s.contains(&ctx.integer(8, 5).unwrap()).unwrap());
        assert!(s.contains(&ctx.integer(7, 1).unwrap()).is_err());
    }

    fn arb_set(p: u64) -> impl Strategy<Value = ClopenSet> {
        proptest::collection::vec((0u32..4, 0i64..1000), 0..6).prop_map(move |bs| set(p, &bs))
    }

    fn arb_case() -> impl Strategy<Value = (ClopenSet, ClopenSet)> {
        prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| (arb_set(p), arb_set(p)))
    }

    proptest! {
        #[test]
        fn operations_match_residue_oracle((a, b) in arb_case()) {
            let level = 4;
            let (ma, mb) = (bitmap(&a, level), bitmap(&b, level));
            let check = |s: &ClopenSet, f: &dyn Fn(bool, bool) -> bool| {
                let ms = bitmap(s, level);
                ms.iter().zip(ma.iter().zip(&mb)).all(|(&x, (&y, &z))| x == f(y, z))
            };
            prop_assert!(check(&a.union(&b).unwrap(), &|x, y| x || y));
            prop_assert!(check(&a.intersect(&b).unwrap(), &|x, y| x && y));
            prop_assert!(check(&a.difference(&b).unwrap(), &|x, y| x && !y));
            prop_assert!(check(&a.complement(), &|x, _| !x));
            let count = ma.iter().filter(|&&x| x).count();
            let total = a.prime().get().pow(level) as usize;
            prop_assert_eq!(a.haar_measure(), BigRational::new(count.into(), total.into()));
        }

        #[test]
        fn measure_laws((a, b) in arb_case(), shift in 0i64..100_000) {
            let one = BigRational::one();
            prop_assert_eq!(a.haar_measure() + a.complement().haar_measure(), one);
            let disjoint = b.difference(&a).unwrap();
            prop_assert_eq!(a.union(&disjoint).unwrap().haar_measure(), a.haar_measure() + disjoint.haar_measure());
            prop_assert_eq!(a.translate(&BigInt::from(shift)).haar_measure(), a.haar_measure());
            let refined = a.refine_to(a.max_level() + 2);
            let total: BigRational = refined.iter().map(Ball::measure).fold(BigRational::zero(), |x, y| x + y);
            prop_assert_eq!(total, a.haar_measure());
        }

        #[test]
        fn canonical_form_is_unique((a, b) in arb_case()) {
            let u1 = a.union(&b).unwrap();
            let u2 = b.union(&a).unwrap();
            prop_assert_eq!(&u1, &u2);
            let level = u1.max_level() + 1;
            let rebuilt = ClopenSet::from_balls(u1.prime(), u1.refine_to(level)).unwrap();
            prop_assert_eq!(&rebuilt, &u1);
            prop_assert_eq!(u1.to_json(), rebuilt.to_json());
            prop_assert_eq!(u1.complement().complement(), u1.clone());
            for (i, x) in u1.balls().iter().enumerate() {
                for y in &u1.balls()[i + 1..] {
                    prop_assert!(x.intersect(y).is_none());
                }
            }
        }
    }
}
