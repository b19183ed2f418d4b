//! Hensel's lemma as a contraction-mapping solver.
//!
//! For `f` on the ball `B̄(0, p^-m)`, a center `x0` and a radius exponent
//! `t`, the condition `t + mu2 > v(f'(x0))` makes
//!
//! ```text
//! h_z(x) = x0 + f'(x0)^-1 (z - f(x0)) - f'(x0)^-1 g0(x),
//! g0(x)  = f(x) - f(x0) - f'(x0)(x - x0)
//! ```
//!
//! a contraction of `B̄(x0, p^-t)` whose fixed point solves `f(x) = z` for
//! every `z` with `v(z - f(x0)) >= v(f'(x0)) + t`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::analytic::PadicPolynomial;
use crate::error::{Error, Result};
use crate::ext::ExtInt;
use crate::padic::PadicNumber;
use crate::prime_field::Prime;

/// Largest number of source residues [`ball_image_check`] enumerates.
pub const IMAGE_GUARD: u128 = 1_000_000;

/// Largest prime for which root seeds mod `p` are found by exhaustive search.
pub const SEED_SEARCH_LIMIT: u64 = 10_000_000;

/// Outcome of [`check_condition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// `v(f'(x0))`.
    pub v_fprime: i64,
    /// `min_{j >= 2} (v(a_j) + (j - 2) m)`.
    pub mu2: ExtInt,
    /// `t + mu2 - v(f'(x0))`.
    pub gap: ExtInt,
    /// `gap > 0`: closed-ball conclusions hold.
    pub strict: bool,
    /// `gap >= 0`: open-ball conclusions hold.
    pub nonstrict: bool,
}

pub fn check_condition(f: &PadicPolynomial, x0: &PadicNumber, m: i64, t_exp: i64) -> Result<ConditionReport> {
    f.prime().check_same(x0.prime())?;
    if !x0.is_in_ball(m) {
        return Err(Error::domain(format!("center has valuation {}, outside v(x) >= {m}", x0.valuation())));
    }
    if t_exp < m {
        return Err(Error::domain(format!("radius exponent {t_exp} is below the domain exponent {m}")));
    }
    let fp = f.derivative().eval(x0)?;
    let v_fprime = fp.exact_valuation().ok_or(Error::IndeterminateCondition)?;
    let mu2 = f.m2_bound(m);
    let gap = mu2.plus(t_exp - v_fprime);
    Ok(ConditionReport {
        v_fprime,
        mu2,
        gap,
        strict: gap > ExtInt::Finite(0),
        nonstrict: gap >= ExtInt::Finite(0),
    })
}

/// A validated instance of the lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselProblem {
    f: PadicPolynomial,
    x0: PadicNumber,
    m: i64,
    t_exp: i64,
    fp_x0: PadicNumber,
    report: ConditionReport,
    /// Added to every solution; set when the problem was recentred.
    offset: Option<PadicNumber>,
}

/// A root together with the number of `h_z` steps it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselSolution {
    pub root: PadicNumber,
    pub iterations: u32,
}

impl HenselProblem {
    pub fn new(f: PadicPolynomial, x0: PadicNumber, m: i64, t_exp: i64) -> Result<Self> {
        let report = check_condition(&f, &x0, m, t_exp)?;
        if !report.strict {
            return Err(Error::ConditionNotMet(format!(
                "t + mu2 = {} does not exceed v(f'(x0)) = {}",
                report.mu2.plus(t_exp),
                report.v_fprime
            )));
        }
        let fp_x0 = f.derivative().eval(&x0)?;
        Ok(HenselProblem { f, x0, m, t_exp, fp_x0, report, offset: None })
    }

    /// Problem for `f(x) = 0` near `x0` under `|f(x0)| < |f'(x0)|^2`.
    ///
    /// The polynomial is recentred at `x0` and the ball is taken with
    /// `m = t = v(f(x0)) - v(f'(x0))`; solutions are reported around `x0`.
    pub fn classical(f: &PadicPolynomial, x0: &PadicNumber) -> Result<Self> {
        f.prime().check_same(x0.prime())?;
        let fx0 = f.eval(x0)?;
        let fp = f.derivative().eval(x0)?;
        let v_fp = fp.exact_valuation().ok_or(Error::IndeterminateCondition)?;
        let v_f = fx0.valuation().lower_bound();
        if v_f <= 2 * v_fp {
            return Err(Error::ConditionNotMet(format!("v(f(x0)) = {v_f} does not exceed 2 v(f'(x0)) = {}", 2 * v_fp)));
        }
        let t = v_f - v_fp;
        let g = f.recenter(x0)?;
        let center = PadicNumber::zero(f.prime(), x0.abs_prec().max(t));
        let mut problem = HenselProblem::new(g, center, t, t)?;
        problem.offset = Some(x0.clone());
        Ok(problem)
    }

    pub fn polynomial(&self) -> &PadicPolynomial {
        &self.f
    }

    pub fn center(&self) -> &PadicNumber {
        &self.x0
    }

    pub fn domain_exponent(&self) -> i64 {
        self.m
    }

    pub fn radius_exponent(&self) -> i64 {
        self.t_exp
    }

    pub fn report(&self) -> ConditionReport {
        self.report
    }

    pub fn v_fprime(&self) -> i64 {
        self.report.v_fprime
    }

    /// Absolute precision of the extra digits carried during iteration.
    fn working_precision(&self, n: i64) -> i64 {
        let deg = self.f.degree() as i64;
        n + self.report.v_fprime.abs() + deg * self.m.abs() + self.x0.valuation().lower_bound().min(0).abs() * deg + 2
    }

    fn check_target(&self, z: &PadicNumber) -> Result<PadicNumber> {
        self.f.prime().check_same(z.prime())?;
        let fx0 = self.f.eval(&self.x0)?;
        let need = self.report.v_fprime + self.t_exp;
        if !z.sub(&fx0)?.is_in_ball(need) {
            return Err(Error::domain(format!("target lies outside B(f(x0), p^-{need})")));
        }
        Ok(fx0)
    }

    fn iteration_limit(&self, n: i64) -> u32 {
        (n - self.report.v_fprime - self.t_exp).max(0) as u32 + 3
    }

    /// `Some(done)` once `v(f(x) - z) >= n` is certain, `None` to continue.
    fn residual_done(&self, x: &PadicNumber, z: &PadicNumber, n: i64) -> Result<bool> {
        let r = self.f.eval(x)?.sub(z)?;
        if r.is_in_ball(n) {
            return Ok(true);
        }
        if r.is_zero() {
            return Err(Error::InsufficientPrecision { needed: n, available: r.abs_prec() });
        }
        Ok(false)
    }

    fn finish(&self, x: PadicNumber, n: i64, iterations: u32) -> Result<HenselSolution> {
        let prec = n - self.report.v_fprime;
        let mut root = x.lift_exact(prec);
        if !root.sub(&self.x0.lift_exact(prec))?.is_in_ball(self.t_exp.min(prec)) {
            return Err(Error::Internal("fixed point left the source ball".into()));
        }
        if let Some(offset) = &self.offset {
            root = offset.lift_exact(prec).add(&root)?;
        }
        Ok(HenselSolution { root, iterations })
    }

    /// Root of `f(x) = z` in `B̄(x0, p^-t)` with `v(f(x) - z) >= n`, known to
    /// `n - v(f'(x0))` digits.
    pub fn solve(&self, z: &PadicNumber, n: i64) -> Result<PadicNumber> {
        Ok(self.solve_traced(z, n)?.root)
    }

    pub fn solve_traced(&self, z: &PadicNumber, n: i64) -> Result<HenselSolution> {
        let fx0 = self.check_target(z)?;
        let w = self.working_precision(n);
        let c = self.fp_x0.invert()?;
        let x0 = self.x0.lift_exact(w);
        let base = x0.add(&c.mul(&z.sub(&fx0)?)?)?;
        let mut x = x0.clone();
        let limit = self.iteration_limit(n);
        for k in 0..=limit {
            if self.residual_done(&x, z, n)? {
                return self.finish(x, n, k);
            }
            let g0 = self.f.eval(&x)?.sub(&fx0)?.sub(&self.fp_x0.mul(&x.sub(&x0)?)?)?;
            let next = base.sub(&c.mul(&g0)?)?.lift_exact(w);
            if next == x {
                return Err(Error::InsufficientPrecision { needed: n, available: self.f.eval(&x)?.sub(z)?.abs_prec() });
            }
            x = next;
        }
        Err(Error::Internal(format!("h_z did not converge within {limit} steps")))
    }

    /// Newton's `x - (f(x) - z) / f'(x)` from the same center; a cross-check
    /// for [`solve`](Self::solve).
    pub fn newton_solve(&self, z: &PadicNumber, n: i64) -> Result<PadicNumber> {
        self.check_target(z)?;
        let w = self.working_precision(n);
        let df = self.f.derivative();
        let mut x = self.x0.lift_exact(w);
        let limit = self.iteration_limit(n);
        for k in 0..=limit {
            if self.residual_done(&x, z, n)? {
                return Ok(self.finish(x, n, k)?.root);
            }
            let step = self.f.eval(&x)?.sub(z)?.div(&df.eval(&x)?)?;
            let next = x.sub(&step)?.lift_exact(w);
            if next == x {
                return Err(Error::InsufficientPrecision { needed: n, available: self.f.eval(&x)?.sub(z)?.abs_prec() });
            }
            x = next;
        }
        Err(Error::Internal(format!("Newton did not converge within {limit} steps")))
    }
}

fn exact_one(p: Prime, abs_prec: i64) -> PadicNumber {
    PadicNumber::normalize(p, 0, &BigInt::one(), abs_prec)
}

/// `x^n` with coefficients exact to `abs_prec` digits.
fn power_poly(p: Prime, n: u64, abs_prec: i64) -> Result<PadicPolynomial> {
    let mut cs = vec![PadicNumber::zero(p, abs_prec); n as usize + 1];
    cs[n as usize] = exact_one(p, abs_prec);
    PadicPolynomial::new(p, cs)
}

fn unit_residue(u: &PadicNumber) -> Result<u64> {
    if !u.is_unit() {
        return Err(Error::domain(format!("expected a unit, got valuation {}", u.valuation())));
    }
    let r = u.reduce_mod(1)?;
    Ok(r.representative().to_u64().expect("residue below p"))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Square root of a unit `u`, to the precision `u` determines.
///
/// For odd `p` the root is congruent to the smaller of the two square roots
/// of `u` mod `p` and has as many digits as `u`. For `p = 2` the root is the
/// one congruent to 1 mod 4, needs `u ≡ 1 mod 8`, and has one digit fewer.
pub fn sqrt(u: &PadicNumber) -> Result<PadicNumber> {
    let p = u.prime();
    let a = unit_residue(u)?;
    let n = u.abs_prec();
    let w = n + 2;
    let f = power_poly(p, 2, w)?;
    let problem = if p.get() == 2 {
        if n < 3 {
            return Err(Error::InsufficientPrecision { needed: 3, available: n });
        }
        let r8 = u.reduce_mod(3)?;
        if !r8.representative().is_one() {
            return Err(Error::NoRoot(format!("{} is not a square mod 8", r8.representative())));
        }
        HenselProblem::new(f, exact_one(p, w), 0, 2)?
    } else {
        let r = sqrt_mod_p(a, p.get()).ok_or_else(|| Error::NoRoot(format!("{a} is not a square mod {p}")))?;
        let x0 = r.min(p.get() - r);
        HenselProblem::new(f, PadicNumber::normalize(p, 0, &BigInt::from(x0), w), 0, 1)?
    };
    problem.solve(u, n)
}

/// Smallest `x` in `1..p` with `x^n ≡ a mod p`.
fn nth_root_mod_p(a: u64, n: u64, p: u64) -> Result<u64> {
    if p == 2 {
        return Ok(1);
    }
    let g = n.gcd(&(p - 1));
    if g == 1 {
        let e = crate::prime_field::mod_inverse(&BigInt::from(n), &BigInt::from(p - 1)).expect("coprime");
        return Ok(pow_mod(a, e.to_u64().expect("below p"), p));
    }
    if pow_mod(a, (p - 1) / g, p) != 1 {
        return Err(Error::NoRoot(format!("{a} is not a {n}-th power mod {p}")));
    }
    if p > SEED_SEARCH_LIMIT {
        return Err(Error::GuardExceeded { size: p as u128, limit: SEED_SEARCH_LIMIT as u128 });
    }
    let e = n % (p - 1);
    (1..p)
        .find(|&x| pow_mod(x, e, p) == a)
        .ok_or_else(|| Error::Internal("power residue without a root".into()))
}

/// `n`-th root of a unit `u` for `n` prime to `p`, to the precision of `u`.
/// The seed mod `p` is the smallest residue that works.
pub fn nth_root(u: &PadicNumber, n: u64) -> Result<PadicNumber> {
    let p = u.prime();
    if n == 0 || n.is_multiple_of(p.get()) {
        return Err(Error::domain(format!("root index {n} must be positive and prime to {p}")));
    }
    let a = unit_residue(u)?;
    let x0 = nth_root_mod_p(a, n, p.get())?;
    let prec = u.abs_prec();
    let w = prec + 2;
    let problem = HenselProblem::new(power_poly(p, n, w)?, PadicNumber::normalize(p, 0, &BigInt::from(x0), w), 0, 1)?;
    problem.solve(u, prec)
}

/// Largest `p` for which [`teichmuller`] also solves `x^(p-1) = 1` by Hensel.
pub const TEICHMULLER_CROSS_CHECK_LIMIT: u64 = 4096;

/// The `(p-1)`-st root of unity congruent to the unit `a` mod `p`, to `n`
/// digits, via the fixed point of `x -> x^p`. For small `p` the result is
/// cross-checked against a Hensel solve of `x^(p-1) = 1`.
pub fn teichmuller(a: &PadicNumber, n: i64) -> Result<PadicNumber> {
    let p = a.prime();
    let a0 = unit_residue(a)?;
    if n < 1 {
        return Err(Error::domain("precision must be at least 1"));
    }
    let modulus = p.pow(n as u32);
    let pb = p.big();
    let mut x = BigInt::from(a0);
    let mut steps = 0;
    loop {
        let next = x.modpow(&pb, &modulus);
        if next == x {
            break;
        }
        x = next;
        steps += 1;
        if steps > n + 1 {
            return Err(Error::Internal("p-power iteration did not stabilize".into()));
        }
    }
    let omega = PadicNumber::normalize(p, 0, &x, n);
    if p.get() <= TEICHMULLER_CROSS_CHECK_LIMIT {
        let w = n + 2;
        let f = power_poly(p, p.get() - 1, w)?;
        let problem = HenselProblem::new(f, PadicNumber::normalize(p, 0, &BigInt::from(a0), w), 0, 1)?;
        let lifted = problem.solve(&exact_one(p, n), n)?;
        if lifted != omega {
            return Err(Error::Internal(format!("Teichmuller paths disagree: {omega} vs {lifted}")));
        }
    }
    Ok(omega)
}

/// Summary of an enumerated ball image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageCertificate {
    /// Source residues are taken mod `p^source_level`.
    pub source_level: u32,
    /// Images are compared mod `p^target_level`.
    pub target_level: u32,
    /// Residues in the source ball, and in the target ball.
    pub ball_size: u64,
    /// Distinct images that landed in the target ball.
    pub hits: u64,
    /// Images outside the target ball.
    pub outside: u64,
}

impl ImageCertificate {
    pub fn holds(&self) -> bool {
        self.outside == 0 && self.hits == self.ball_size
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallImage {
    /// The strict condition fails, so no claim is made.
    ConditionNotMet(ConditionReport),
    Checked(ImageCertificate),
}

impl BallImage {
    pub fn holds(&self) -> bool {
        matches!(self, BallImage::Checked(c) if c.holds())
    }
}

fn eval_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, m) + c) % m)
}

/// Checks `f(B̄(x0, p^-t)) = B̄(f(x0), p^-(v(f'(x0)) + t))` on residues:
/// every class mod `p^j` in the source ball is mapped, mod `p^(j + v(f'(x0)))`,
/// and the images must fill the target ball exactly.
///
/// Requires integral coefficients, an integral center and `m >= 0`.
pub fn ball_image_check(f: &PadicPolynomial, x0: &PadicNumber, m: i64, t_exp: i64, j: u32) -> Result<BallImage> {
    let report = check_condition(f, x0, m, t_exp)?;
    if !report.strict {
        return Ok(BallImage::ConditionNotMet(report));
    }
    if m < 0 || !x0.is_in_ball(0) || f.coeffs().iter().any(|a| !a.is_in_ball(0)) {
        return Err(Error::domain("ball image check needs integral data and m >= 0"));
    }
    if (j as i64) < t_exp {
        return Err(Error::domain(format!("verification level {j} is below the radius exponent {t_exp}")));
    }
    let p = f.prime();
    let t = t_exp as u32;
    let size = (p.get() as u128).checked_pow(j - t).unwrap_or(u128::MAX);
    if size > IMAGE_GUARD {
        return Err(Error::GuardExceeded { size, limit: IMAGE_GUARD });
    }
    let level = j + report.v_fprime as u32;
    let modulus = p.pow(level).to_u64().filter(|&m| m < (1 << 62)).ok_or_else(|| {
        Error::domain(format!("modulus {p}^{level} is too large to enumerate"))
    })?;
    let coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|a| a.reduce_mod(level).map(|r| r.representative().to_u64().expect("below modulus")))
        .collect::<Result<_>>()?;
    let center = x0.lift_exact(level as i64).reduce_mod(level)?.representative().to_u64().expect("below modulus");
    let fx0 = eval_mod(&coeffs, center, modulus);
    let step_src = p.pow(t).to_u64().expect("below modulus");
    let step_dst = p.pow(report.v_fprime as u32 + t).to_u64().expect("below modulus");
    let size = size as u64;
    let mut seen = vec![false; size as usize];
    let (mut hits, mut outside) = (0u64, 0u64);
    for k in 0..size {
        let x = (center + mul_mod(step_src, k, modulus)) % modulus;
        let d = (eval_mod(&coeffs, x, modulus) + modulus - fx0) % modulus;
        if !d.is_multiple_of(step_dst) {
            outside += 1;
            continue;
        }
        let idx = (d / step_dst) as usize;
        if !seen[idx] {
            seen[idx] = true;
            hits += 1;
        }
    }
    Ok(BallImage::Checked(ImageCertificate { source_level: j, target_level: level, ball_size: size, hits, outside }))
}
