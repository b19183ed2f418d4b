//! Batch command-line front end.
//!
//! [`run`] parses an argument vector and returns the exit code and output
//! text without touching the process, so the binary and the tests share one
//! code path. Exit codes: 0 success, 1 domain error, 2 usage or parse error.

use std::fmt::Display;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analytic::{radius_of_convergence, PadicPolynomial, ValuationGrowthRule};
use crate::clopen_measure::{residue_count, Ball, ClopenSet, SetOp};
use crate::error::{Error, Result};
use crate::ext::{ExtInt, Valuation};
use crate::formal_series::{CoeffField, LaurentSeries, PowerSeries, PrimeField, Rationals};
use crate::hensel::{self, BallImage, ConditionReport, HenselProblem};
use crate::padic::{PadicNumber, PrecisionCap, Qp};
use crate::plog;
use crate::prime_field::Prime;
use crate::summation_lab::{fubini_check, Exponent, FiniteFamily, LrNorm, NormedValue};

/// Extra digits carried internally beyond `--prec`.
const GUARD_DIGITS: i64 = 8;

#[derive(Debug, Parser)]
#[command(name = "padicore", version, about = "Exact p-adic and formal series calculator")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Arithmetic in Q_p.
    Padic(PadicArgs),
    /// Root finding by Hensel's lemma.
    Hensel {
        #[command(subcommand)]
        cmd: HenselCmd,
    },
    /// The p-adic logarithm log(1 + x).
    Plog {
        #[command(subcommand)]
        cmd: PlogCmd,
    },
    /// Truncated power and Laurent series over F_p or Q.
    Series(SeriesArgs),
    /// Clopen subsets of Z_p and their Haar measure.
    Measure(MeasureArgs),
    /// Norms and rearrangements of finite families.
    Sums(SumsArgs),
    /// Polynomials over Q_p as functions on balls.
    Analytic(AnalyticArgs),
}

#[derive(Debug, Args)]
struct Prec {
    /// The prime p.
    #[arg(long)]
    p: u64,
    /// Absolute precision in digits.
    #[arg(long, default_value_t = 20)]
    prec: i64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PadicOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow,
    Val,
    Digits,
    Show,
}

#[derive(Debug, Args)]
struct PadicArgs {
    op: PadicOp,
    #[command(flatten)]
    prec: Prec,
    /// Operands: rationals, pretty or compact forms, or JSON.
    #[arg(allow_hyphen_values = true)]
    operands: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum HenselCmd {
    /// Solve f(x) = z near x0.
    Solve {
        #[command(flatten)]
        prec: Prec,
        /// Polynomial such as "x^2-2".
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        /// Radius exponent t of the ball B(x0, p^-t).
        #[arg(long, default_value_t = 1)]
        t: i64,
        /// Domain exponent m of B(0, p^-m).
        #[arg(long, default_value_t = 0)]
        m: i64,
        /// Use |f(x0)| < |f'(x0)|^2 instead of --t/--m.
        #[arg(long)]
        classical: bool,
        /// Iterate Newton's map instead of h_z.
        #[arg(long)]
        newton: bool,
    },
    /// Square root of a unit.
    Sqrt {
        #[command(flatten)]
        prec: Prec,
        #[arg(allow_hyphen_values = true)]
        u: String,
    },
    /// n-th root of a unit, n prime to p.
    Root {
        #[command(flatten)]
        prec: Prec,
        #[arg(long)]
        n: u64,
        #[arg(allow_hyphen_values = true)]
        u: String,
    },
    /// Teichmuller representative of a unit.
    Teichmuller {
        #[command(flatten)]
        prec: Prec,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Report the Hensel condition.
    Check {
        #[command(flatten)]
        prec: Prec,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1)]
        t: i64,
        #[arg(long, default_value_t = 0)]
        m: i64,
    },
    /// Enumerate f(B(x0, p^-t)) on residues mod p^level.
    Image {
        #[command(flatten)]
        prec: Prec,
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1)]
        t: i64,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long)]
        level: u32,
    },
}

#[derive(Debug, Subcommand)]
enum PlogCmd {
    /// log(1 + x).
    Log {
        #[command(flatten)]
        prec: Prec,
        #[arg(long = "x", allow_hyphen_values = true)]
        x_opt: Option<String>,
        #[arg(allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// x with log(1 + x) = z.
    Invert {
        #[command(flatten)]
        prec: Prec,
        #[arg(long = "z", allow_hyphen_values = true)]
        z_opt: Option<String>,
        #[arg(allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Polynomial agreeing with log(1 + x) on v(x) >= s.
    Truncate {
        #[command(flatten)]
        prec: Prec,
        #[arg(long, default_value_t = 1)]
        s: i64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
    Compose,
    Derive,
    Invert,
    Order,
    Abs,
    Show,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    op: SeriesOp,
    /// Coefficient field: a prime p for F_p, or Q.
    #[arg(long)]
    field: String,
    /// Truncate operands to O(T^order).
    #[arg(long)]
    order: Option<usize>,
    /// Treat operands as Laurent series.
    #[arg(long)]
    laurent: bool,
    /// Radius r in (0, 1) for `abs`, as a rational.
    #[arg(long)]
    radius: Option<String>,
    #[arg(allow_hyphen_values = true)]
    operands: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureOp {
    Union,
    Intersect,
    Difference,
    Complement,
    Measure,
    Split,
    Count,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long, value_enum)]
    op: MeasureOp,
    /// Prime for `count`, and for sets written without `in Z_p`.
    #[arg(long)]
    p: Option<u64>,
    /// Level for `count`.
    #[arg(long)]
    level: Option<u32>,
    /// Sets in pretty or JSON form; `split` takes one ball as a set.
    sets: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SumsOp {
    Bfs,
    Norms,
    Fubini,
    Partition,
}

#[derive(Debug, Args)]
struct SumsArgs {
    op: SumsOp,
    /// Family as JSON: {"mode":"real","values":[...]} or
    /// {"mode":"padic","p":5,"prec":10,"values":[...]}; grids use "rows".
    input: String,
    /// Exponents for `norms`, e.g. "1,2,inf".
    #[arg(long, default_value = "1,2,inf")]
    r: String,
    /// Blocks for `partition`, e.g. "0,1;2,3".
    #[arg(long)]
    blocks: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnalyticOp {
    Eval,
    Recenter,
    Derive,
    Bounds,
    Radius,
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    op: AnalyticOp,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 20)]
    prec: i64,
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Evaluation point or new center.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Domain exponent m of B(0, p^-m).
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    /// Growth-rule slope for `radius`, as a rational.
    #[arg(long, default_value = "0")]
    slope: String,
    /// Growth rule with the -floor(log_p j) term.
    #[arg(long)]
    log: bool,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    offset: i64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Output of a command in both formats.
struct Output {
    pretty: String,
    json: Value,
}

impl Output {
    fn new(pretty: impl Into<String>, json: Value) -> Self {
        Output { pretty: pretty.into(), json }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Pretty => format!("{}\n", self.pretty),
            Format::Json => format!("{}\n", self.json),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok(out) => Outcome { code: 0, stdout: out.render(cli.format), stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        _ => 1,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Padic(a) => padic_cmd(a),
        Command::Hensel { cmd } => hensel_cmd(cmd),
        Command::Plog { cmd } => plog_cmd(cmd),
        Command::Series(a) => series_cmd(a),
        Command::Measure(a) => measure_cmd(a),
        Command::Sums(a) => sums_cmd(a),
        Command::Analytic(a) => analytic_cmd(a),
    }
}

/// Context for `--p`, enforcing the precision cap on `--prec` and leaving
/// room for guard digits internally.
fn context(p: u64, prec: i64) -> Result<Qp> {
    let cap = PrecisionCap::from_env()?;
    if prec > cap.get() as i64 {
        return Err(Error::PrecisionCapExceeded { requested: prec, cap: cap.get() });
    }
    if prec < 1 {
        return Err(usage("--prec must be at least 1"));
    }
    Ok(Qp::new(p)?.with_cap(PrecisionCap::new(cap.get() + 2 * GUARD_DIGITS as u32)?))
}

fn padic_out(x: &PadicNumber) -> Output {
    Output::new(x.to_pretty(), serde_json::to_value(x.to_json_repr()).expect("serializable"))
}

fn valuation_json(v: Valuation) -> Value {
    match v {
        Valuation::Exact(v) => json!({"exact": v}),
        Valuation::AtLeast(v) => json!({"at_least": v}),
    }
}

fn ext_json(v: ExtInt) -> Value {
    match v {
        ExtInt::Finite(v) => json!(v),
        ExtInt::Infinite => json!("inf"),
    }
}

fn padic_cmd(a: &PadicArgs) -> Result<Output> {
    let ctx = context(a.prec.p, a.prec.prec)?;
    let n = a.prec.prec;
    let arity = match a.op {
        PadicOp::Add | PadicOp::Sub | PadicOp::Mul | PadicOp::Div | PadicOp::Pow => 2,
        _ => 1,
    };
    if a.operands.len() != arity {
        return Err(usage(format!("{:?} takes {arity} operand(s), got {}", a.op, a.operands.len())));
    }
    let x = PadicNumber::parse_any(&a.operands[0], &ctx, n)?;
    let other = || PadicNumber::parse_any(&a.operands[1], &ctx, n);
    Ok(match a.op {
        PadicOp::Add => padic_out(&x.add(&other()?)?),
        PadicOp::Sub => padic_out(&x.sub(&other()?)?),
        PadicOp::Mul => padic_out(&x.mul(&other()?)?),
        PadicOp::Div => padic_out(&x.div(&other()?)?),
        PadicOp::Neg => padic_out(&x.neg()),
        PadicOp::Inv => padic_out(&x.invert()?),
        PadicOp::Pow => {
            let e: u64 = a.operands[1].trim().parse().map_err(|_| usage("exponent must be a nonnegative integer"))?;
            padic_out(&x.pow(e)?)
        }
        PadicOp::Show => padic_out(&x),
        PadicOp::Val => Output::new(x.valuation().to_string(), valuation_json(x.valuation())),
        PadicOp::Digits => {
            let d = x.digits();
            let v = x.exact_valuation();
            Output::new(
                format!("{d:?} from p^{}", v.map_or("-".to_string(), |v| v.to_string())),
                json!({"valuation": v, "digits": d, "abs_prec": x.abs_prec()}),
            )
        }
    })
}

fn parse_poly(s: &str, ctx: &Qp, prec: i64) -> Result<PadicPolynomial> {
    PadicPolynomial::parse(s, ctx, prec)
}

fn condition_out(r: &ConditionReport) -> Output {
    Output::new(
        format!(
            "v(f'(x0)) = {}\nmu2 = {}\ngap = {}\nstrict: {}\nnonstrict: {}",
            r.v_fprime, r.mu2, r.gap, r.strict, r.nonstrict
        ),
        json!({
            "v_fprime": r.v_fprime,
            "mu2": ext_json(r.mu2),
            "gap": ext_json(r.gap),
            "strict": r.strict,
            "nonstrict": r.nonstrict,
        }),
    )
}

fn hensel_cmd(cmd: &HenselCmd) -> Result<Output> {
    match cmd {
        HenselCmd::Solve { prec, poly, x0, z, t, m, classical, newton } => {
            let ctx = context(prec.p, prec.prec)?;
            let w = prec.prec + GUARD_DIGITS;
            let f = parse_poly(poly, &ctx, w)?;
            let x0 = PadicNumber::parse_any(x0, &ctx, w)?;
            let z = PadicNumber::parse_any(z, &ctx, w)?;
            let problem =
                if *classical { HenselProblem::classical(&f, &x0)? } else { HenselProblem::new(f, x0, *m, *t)? };
            let n = prec.prec + problem.v_fprime();
            let root = if *newton { problem.newton_solve(&z, n)? } else { problem.solve(&z, n)? };
            Ok(padic_out(&root))
        }
        HenselCmd::Sqrt { prec, u } => {
            let ctx = context(prec.p, prec.prec)?;
            let extra = i64::from(prec.p == 2);
            let u = PadicNumber::parse_any(u, &ctx, prec.prec + extra)?;
            Ok(padic_out(&hensel::sqrt(&u)?))
        }
        HenselCmd::Root { prec, n, u } => {
            let ctx = context(prec.p, prec.prec)?;
            let u = PadicNumber::parse_any(u, &ctx, prec.prec)?;
            Ok(padic_out(&hensel::nth_root(&u, *n)?))
        }
        HenselCmd::Teichmuller { prec, a } => {
            let ctx = context(prec.p, prec.prec)?;
            let a = PadicNumber::parse_any(a, &ctx, prec.prec)?;
            Ok(padic_out(&hensel::teichmuller(&a, prec.prec)?))
        }
        HenselCmd::Check { prec, poly, x0, t, m } => {
            let ctx = context(prec.p, prec.prec)?;
            let f = parse_poly(poly, &ctx, prec.prec)?;
            let x0 = PadicNumber::parse_any(x0, &ctx, prec.prec)?;
            Ok(condition_out(&hensel::check_condition(&f, &x0, *m, *t)?))
        }
        HenselCmd::Image { prec, poly, x0, t, m, level } => {
            let ctx = context(prec.p, prec.prec)?;
            let f = parse_poly(poly, &ctx, prec.prec)?;
            let x0 = PadicNumber::parse_any(x0, &ctx, prec.prec)?;
            Ok(match hensel::ball_image_check(&f, &x0, *m, *t, *level)? {
                BallImage::ConditionNotMet(r) => {
                    let c = condition_out(&r);
                    Output::new(
                        format!("condition not met; no claim\n{}", c.pretty),
                        json!({"condition_met": false, "report": c.json}),
                    )
                }
                BallImage::Checked(c) => Output::new(
                    format!(
                        "holds: {}\nsource: {} residues mod {}^{}\ntarget level: {}\nhits: {}\noutside: {}",
                        c.holds(),
                        c.ball_size,
                        prec.p,
                        c.source_level,
                        c.target_level,
                        c.hits,
                        c.outside
                    ),
                    json!({
                        "condition_met": true,
                        "holds": c.holds(),
                        "source_level": c.source_level,
                        "target_level": c.target_level,
                        "ball_size": c.ball_size,
                        "hits": c.hits,
                        "outside": c.outside,
                    }),
                ),
            })
        }
    }
}

fn one_operand<'a>(flag: &'a Option<String>, pos: &'a Option<String>, name: &str) -> Result<&'a str> {
    match (flag, pos) {
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (Some(_), Some(_)) => Err(usage(format!("give {name} either positionally or with --{name}, not both"))),
        (None, None) => Err(usage(format!("missing operand {name}"))),
    }
}

fn plog_cmd(cmd: &PlogCmd) -> Result<Output> {
    match cmd {
        PlogCmd::Log { prec, x_opt, x } => {
            let ctx = context(prec.p, prec.prec)?;
            let x = PadicNumber::parse_any(one_operand(x_opt, x, "x")?, &ctx, prec.prec)?;
            Ok(padic_out(&plog::log1p(&x, prec.prec)?))
        }
        PlogCmd::Invert { prec, z_opt, z } => {
            let ctx = context(prec.p, prec.prec)?;
            let z = PadicNumber::parse_any(one_operand(z_opt, z, "z")?, &ctx, prec.prec)?;
            Ok(padic_out(&plog::log_inverse(&z, prec.prec)?))
        }
        PlogCmd::Truncate { prec, s } => {
            let ctx = context(prec.p, prec.prec)?;
            let f = plog::truncate_to_poly(ctx.prime(), prec.prec, *s)?;
            Ok(Output::new(f.to_string(), serde_json::to_value(f.to_json_repr()).expect("serializable")))
        }
    }
}

fn series_cmd(a: &SeriesArgs) -> Result<Output> {
    let f = a.field.trim();
    if f.eq_ignore_ascii_case("q") {
        series_in(Rationals, a)
    } else {
        let p: u64 = f
            .trim_start_matches(['F', 'f'])
            .parse()
            .map_err(|_| usage(format!("--field must be a prime or Q, got {f:?}")))?;
        series_in(PrimeField::new(p)?, a)
    }
}

fn parse_radius(a: &SeriesArgs) -> Result<BigRational> {
    let r = a.radius.as_deref().ok_or_else(|| usage("abs needs --radius"))?;
    let (n, d) = crate::padic::parse_rational(r)?;
    Ok(BigRational::new(n, d))
}

fn series_in<F: CoeffField>(field: F, a: &SeriesArgs) -> Result<Output> {
    let arity = match a.op {
        SeriesOp::Add | SeriesOp::Sub | SeriesOp::Mul | SeriesOp::Div | SeriesOp::Compose => 2,
        _ => 1,
    };
    if a.operands.len() != arity {
        return Err(usage(format!("{:?} takes {arity} operand(s), got {}", a.op, a.operands.len())));
    }
    if a.laurent {
        return laurent_in(field, a);
    }
    let parse = |s: &str| -> Result<PowerSeries<F>> {
        let f = PowerSeries::parse_any(&field, s)?;
        Ok(match a.order {
            Some(n) => f.truncate(n),
            None => f,
        })
    };
    let series_out = |f: PowerSeries<F>| Output::new(f.to_pretty(), serde_json::to_value(f.to_json_repr()).expect("serializable"));
    let f = parse(&a.operands[0])?;
    let g = || parse(&a.operands[1]);
    Ok(match a.op {
        SeriesOp::Add => series_out(f.add(&g()?)?),
        SeriesOp::Sub => series_out(f.sub(&g()?)?),
        SeriesOp::Mul => series_out(f.mul(&g()?)?),
        SeriesOp::Div => series_out(f.mul(&g()?.invert()?)?),
        SeriesOp::Compose => series_out(f.compose(&g()?)?),
        SeriesOp::Derive => series_out(f.derive()),
        SeriesOp::Invert => series_out(f.invert()?),
        SeriesOp::Show => series_out(f),
        SeriesOp::Order => Output::new(f.order().to_string(), valuation_json(f.order())),
        SeriesOp::Abs => abs_out(f.abs_r(&parse_radius(a)?)?),
    })
}

fn abs_out(v: crate::formal_series::AbsR) -> Output {
    use crate::formal_series::AbsR;
    match v {
        AbsR::Power { r, exponent } => {
            let value = v_value(&r, exponent);
            Output::new(format!("({r})^{exponent} = {value}"), json!({"radius": r.to_string(), "exponent": exponent, "value": value.to_string()}))
        }
        AbsR::Zero { r, order_prec } => Output::new(
            format!("<= ({r})^{order_prec}"),
            json!({"radius": r.to_string(), "at_most_exponent": order_prec}),
        ),
    }
}

fn v_value(r: &BigRational, e: i64) -> BigRational {
    let base = if e >= 0 { r.clone() } else { num_traits::Inv::inv(r.clone()) };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

fn laurent_in<F: CoeffField>(field: F, a: &SeriesArgs) -> Result<Output> {
    let parse = |s: &str| LaurentSeries::parse_any(&field, s);
    let out = |f: LaurentSeries<F>| Output::new(f.to_pretty(), serde_json::to_value(f.to_json_repr()).expect("serializable"));
    let f = parse(&a.operands[0])?;
    let g = || parse(&a.operands[1]);
    Ok(match a.op {
        SeriesOp::Add => out(f.add(&g()?)?),
        SeriesOp::Sub => out(f.sub(&g()?)?),
        SeriesOp::Mul => out(f.mul(&g()?)?),
        SeriesOp::Div => out(f.div(&g()?)?),
        SeriesOp::Invert => out(f.invert()?),
        SeriesOp::Show => out(f),
        SeriesOp::Order => Output::new(f.valuation().to_string(), valuation_json(f.valuation())),
        SeriesOp::Abs => abs_out(f.abs_r(&parse_radius(a)?)?),
        SeriesOp::Compose | SeriesOp::Derive => {
            return Err(usage(format!("{:?} is not available for Laurent series", a.op)));
        }
    })
}

fn clopen_out(s: &ClopenSet) -> Output {
    Output::new(s.to_pretty(), serde_json::to_value(s.to_json_repr()).expect("serializable"))
}

fn measure_cmd(a: &MeasureArgs) -> Result<Output> {
    let arity = match a.op {
        MeasureOp::Union | MeasureOp::Intersect | MeasureOp::Difference => 2,
        MeasureOp::Complement | MeasureOp::Measure | MeasureOp::Split => 1,
        MeasureOp::Count => 0,
    };
    if a.sets.len() != arity {
        return Err(usage(format!("{:?} takes {arity} set(s), got {}", a.op, a.sets.len())));
    }
    let sets = a
        .sets
        .iter()
        .map(|s| match a.p {
            Some(p) if s.trim_end().ends_with('}') => ClopenSet::parse_any(&format!("{} in Z_{p}", s.trim())),
            _ => ClopenSet::parse_any(s),
        })
        .collect::<Result<Vec<_>>>()?;
    let binary = |op| ClopenSet::apply(op, &sets[0], &sets[1]);
    Ok(match a.op {
        MeasureOp::Union => clopen_out(&binary(SetOp::Union)?),
        MeasureOp::Intersect => clopen_out(&binary(SetOp::Intersect)?),
        MeasureOp::Difference => clopen_out(&binary(SetOp::Difference)?),
        MeasureOp::Complement => clopen_out(&sets[0].complement()),
        MeasureOp::Measure => {
            let m = sets[0].haar_measure();
            Output::new(m.to_string(), json!({"measure": m.to_string()}))
        }
        MeasureOp::Split => {
            let [ball] = sets[0].balls() else {
                return Err(Error::domain("split takes a set consisting of one ball"));
            };
            let parts: Vec<Ball> = ball.split();
            let text: Vec<String> = parts.iter().map(ToString::to_string).collect();
            let balls: Vec<Value> =
                parts.iter().map(|b| json!({"level": b.level(), "center": b.center().to_string()})).collect();
            Output::new(text.join("\n"), json!({"p": ball.prime().get(), "balls": balls}))
        }
        MeasureOp::Count => {
            let p = Prime::new(a.p.ok_or_else(|| usage("count needs --p"))?)?;
            let j = a.level.ok_or_else(|| usage("count needs --level"))?;
            let c = residue_count(p, j)?;
            Output::new(c.to_string(), json!({"p": p.get(), "level": j, "count": c.to_string()}))
        }
    })
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
enum FamilyInput {
    Real {
        #[serde(default)]
        values: Vec<Value>,
        #[serde(default)]
        rows: Vec<Vec<Value>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Padic {
        p: u64,
        #[serde(default = "default_prec")]
        prec: i64,
        #[serde(default)]
        values: Vec<Value>,
        #[serde(default)]
        rows: Vec<Vec<Value>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

fn default_prec() -> i64 {
    20
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn parse_exponents(s: &str) -> Result<Vec<Exponent>> {
    s.split(',')
        .map(|t| match t.trim() {
            "inf" | "infinity" => Ok(Exponent::Infinity),
            t => t
                .parse::<u32>()
                .ok()
                .filter(|&r| r > 0)
                .map(Exponent::Finite)
                .ok_or_else(|| usage(format!("bad exponent {t:?}"))),
        })
        .collect()
}

fn parse_blocks(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';')
        .map(|b| {
            b.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad index {t:?}"))))
                .collect()
        })
        .collect()
}

fn sums_cmd(a: &SumsArgs) -> Result<Output> {
    let input: FamilyInput = serde_json::from_str(&a.input).map_err(|e| usage(format!("family JSON: {e}")))?;
    match input {
        FamilyInput::Real { values, rows, labels } => {
            let parse = |v: &Value| -> Result<BigRational> {
                let (n, d) = crate::padic::parse_rational(&scalar_text(v))?;
                Ok(BigRational::new(n, d))
            };
            let zero = BigRational::from_integer(BigInt::from(0));
            sums_generic(a, &values, &rows, labels, zero, parse)
        }
        FamilyInput::Padic { p, prec, values, rows, labels } => {
            let ctx = context(p, prec)?;
            let parse = |v: &Value| PadicNumber::parse_any(&scalar_text(v), &ctx, prec);
            let zero = PadicNumber::zero(ctx.prime(), prec);
            sums_generic(a, &values, &rows, labels, zero, parse)
        }
    }
}

fn sums_generic<V: NormedValue + Display>(
    a: &SumsArgs,
    values: &[Value],
    rows: &[Vec<Value>],
    labels: Option<Vec<String>>,
    zero: V,
    parse: impl Fn(&Value) -> Result<V>,
) -> Result<Output> {
    if let SumsOp::Fubini = a.op {
        if rows.is_empty() {
            return Err(usage("fubini needs \"rows\""));
        }
        let grid = rows.iter().map(|r| r.iter().map(&parse).collect::<Result<Vec<V>>>()).collect::<Result<Vec<_>>>()?;
        let r = fubini_check(&grid, &zero)?;
        return Ok(Output::new(
            format!("row_first: {}\ncolumn_first: {}\ndirect: {}\nequal: {}", r.row_first, r.column_first, r.direct, r.equal),
            json!({
                "row_first": r.row_first.to_string(),
                "column_first": r.column_first.to_string(),
                "direct": r.direct.to_string(),
                "equal": r.equal,
            }),
        ));
    }
    let vals = values.iter().map(&parse).collect::<Result<Vec<V>>>()?;
    let fam = match labels {
        Some(l) => FiniteFamily::new(l, vals, zero)?,
        None => FiniteFamily::from_values(vals, zero),
    };
    match a.op {
        SumsOp::Bfs => {
            let r = fam.bfs_norm()?;
            let sup = fam.sup_norm();
            let witness: Vec<&str> = r.witness.iter().map(|&i| fam.labels()[i].as_str()).collect();
            Ok(Output::new(
                format!("bfs: {}\nsup: {}\nwitness: {{{}}}", r.value, sup, witness.join(", ")),
                json!({"bfs": r.value.to_string(), "sup": sup.to_string(), "witness": witness}),
            ))
        }
        SumsOp::Norms => {
            let exps = parse_exponents(&a.r)?;
            let mut lines = Vec::new();
            let mut entries = Vec::new();
            for n in fam.norms(&exps) {
                match n {
                    LrNorm::Sup(s) => {
                        lines.push(format!("sup: {s}"));
                        entries.push(json!({"r": "inf", "value": s.to_string()}));
                    }
                    LrNorm::Power { r, rth_power } => {
                        lines.push(format!("l{r}^{r}: {rth_power}"));
                        entries.push(json!({"r": r, "rth_power": rth_power.to_string()}));
                    }
                }
            }
            Ok(Output::new(lines.join("\n"), json!({"norms": entries})))
        }
        SumsOp::Partition => {
            let blocks = parse_blocks(a.blocks.as_deref().ok_or_else(|| usage("partition needs --blocks"))?)?;
            let r = fam.partition_check(&blocks)?;
            let sums: Vec<String> = r.block_sums.iter().map(ToString::to_string).collect();
            Ok(Output::new(
                format!("blocks: [{}]\nsum_of_blocks: {}\ndirect: {}\nequal: {}", sums.join(", "), r.sum_of_blocks, r.direct, r.equal),
                json!({
                    "block_sums": sums,
                    "sum_of_blocks": r.sum_of_blocks.to_string(),
                    "direct": r.direct.to_string(),
                    "equal": r.equal,
                }),
            ))
        }
        SumsOp::Fubini => unreachable!("handled above"),
    }
}

fn poly_out(f: &PadicPolynomial) -> Output {
    Output::new(f.to_string(), serde_json::to_value(f.to_json_repr()).expect("serializable"))
}

fn analytic_cmd(a: &AnalyticArgs) -> Result<Output> {
    if let AnalyticOp::Radius = a.op {
        let (n, d) = crate::padic::parse_rational(&a.slope)?;
        let rule = ValuationGrowthRule::new(BigRational::new(n, d), a.log, a.offset)?;
        let r = radius_of_convergence(&rule);
        return Ok(Output::new(
            format!(
                "rho = p^({})\nconverges iff v(x) >= {}\nboundary terms vanish: {}",
                r.exponent,
                r.min_valuation(),
                r.boundary_terms_vanish
            ),
            json!({
                "exponent": r.exponent.to_string(),
                "min_valuation": r.min_valuation(),
                "boundary_terms_vanish": r.boundary_terms_vanish,
            }),
        ));
    }
    let ctx = context(a.p.ok_or_else(|| usage("--p is required"))?, a.prec)?;
    let f = parse_poly(a.poly.as_deref().ok_or_else(|| usage("--poly is required"))?, &ctx, a.prec)?;
    let point = || -> Result<PadicNumber> {
        PadicNumber::parse_any(a.x.as_deref().ok_or_else(|| usage("--x is required"))?, &ctx, a.prec)
    };
    Ok(match a.op {
        AnalyticOp::Eval => {
            let x = point()?;
            padic_out(&match a.m {
                Some(m) => f.eval_on_ball(&x, m)?,
                None => f.eval(&x)?,
            })
        }
        AnalyticOp::Recenter => poly_out(&f.recenter(&point()?)?),
        AnalyticOp::Derive => poly_out(&f.derivative()),
        AnalyticOp::Bounds => {
            let m = a.m.unwrap_or(0);
            let m1 = match f.m1_bound(m) {
                Ok(v) => ExtInt::Finite(v),
                Err(Error::UndefinedBound) => ExtInt::Infinite,
                Err(e) => return Err(e),
            };
            let m2 = f.m2_bound(m);
            Output::new(format!("m1 = {m1}\nm2 = {m2}"), json!({"m": m, "m1": ext_json(m1), "m2": ext_json(m2)}))
        }
        AnalyticOp::Radius => unreachable!("handled above"),
    })
}
