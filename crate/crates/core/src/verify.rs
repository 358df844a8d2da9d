//! Independent cross-checks of the bounds and identities the engine relies
//! on: remainder integrals by quadrature, sign tables, complete monotonicity
//! sampled at finitely many orders, the Sonin gamma sandwich, and a
//! series oracle for `ψ(x+1) − ψ(y+1)`.
//!
//! Every check produces a [`CheckRecord`]; suites emit them as JSON lines.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::{Float, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bernoulli::{
    bernoulli_number, bernoulli_poly, eval_poly, lambda0, default_root_tolerance, validity, BoundDirection,
};
use crate::enclosure::{Enclosure, Precision};
use crate::engine::{enclose, rough_log_gamma, Query, Target};
use crate::error::{Error, Result};
use crate::expansions::{eval_f, eval_gamma_n, eval_l_derivative, TruncationSpec};

const PREC: Precision = 192;
const SAFETY: f64 = 10.0;
const MAX_SUBDIVISIONS: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Worst of two statuses: fail, then inconclusive, then pass.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// One line of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: Value,
    pub status: Status,
    pub detail: String,
}

impl CheckRecord {
    fn new(check: &str, params: Value, status: Status, detail: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            params,
            status,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Estimate of a remainder integral with an error radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub radius: f64,
    pub subdivisions: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "?")]
    Indeterminate,
}

impl Sign {
    fn of(e: &Enclosure) -> Sign {
        match e.sign() {
            Some(Ordering::Greater) => Sign::Positive,
            Some(Ordering::Less) => Sign::Negative,
            _ => Sign::Indeterminate,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            s => s,
        }
    }
}

/// Certified signs of some difference along a grid.
#[derive(Clone, Debug, Serialize)]
pub struct SignReport {
    #[serde(serialize_with = "ser_rationals")]
    pub grid: Vec<Rational>,
    pub signs: Vec<Sign>,
    /// First adjacent pair of grid points with opposite certified signs.
    #[serde(serialize_with = "ser_bracket")]
    pub first_change: Option<(Rational, Rational)>,
}

impl SignReport {
    fn new(grid: Vec<Rational>, signs: Vec<Sign>) -> Self {
        let first_change = signs
            .windows(2)
            .position(|w| {
                matches!(
                    (w[0], w[1]),
                    (Sign::Positive, Sign::Negative) | (Sign::Negative, Sign::Positive)
                )
            })
            .map(|i| (grid[i].clone(), grid[i + 1].clone()));
        Self {
            grid,
            signs,
            first_change,
        }
    }

    pub fn all(&self, s: Sign) -> bool {
        self.signs.iter().all(|&t| t == s)
    }

    pub fn has_indeterminate(&self) -> bool {
        self.signs.contains(&Sign::Indeterminate)
    }
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ser_bracket<S: serde::Serializer>(
    v: &Option<(Rational, Rational)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some((a, b)) => s.collect_seq([a.to_string(), b.to_string()]),
        None => s.serialize_none(),
    }
}

fn f64_poly(n: u32, shift: f64) -> Vec<f64> {
    // Coefficients of B_n(t + shift) in ascending powers of t, via B_n(t+1) = B_n(t) + n t^{n−1}.
    let mut c: Vec<f64> = bernoulli_poly(n).coefficients().iter().map(|r| r.to_f64()).collect();
    if shift == 1.0 && n >= 1 {
        c[(n - 1) as usize] += n as f64;
    }
    c
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn abs_sum(n: u32) -> f64 {
    bernoulli_poly(n).abs_coefficient_sum().to_f64()
}

/// Bound on the fourth derivative of `B_N(t)/(x+t)^{N+1}` over a piece, by
/// Leibniz with `|B_N^{(k)}| ≤ N!/(N−k)! · Σ|coeff(B_{N−k})|` on `[0, 1]`.
fn fourth_derivative_bound(n: u32, y_min: f64) -> f64 {
    let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
    let mut total = 0.0;
    for k in 0..=4u32 {
        if k > n {
            break;
        }
        let falling: f64 = (0..k).map(|i| (n - i) as f64).product();
        let a_k = falling * abs_sum(n - k);
        let j = 4 - k;
        let rising: f64 = (1..=j).map(|i| (n + i) as f64).product();
        let w_j = rising * y_min.powi(-((n + 1 + j) as i32));
        total += binom[k as usize] * a_k * w_j;
    }
    total
}

fn simpson(c: &[f64], n: u32, x: f64, a: f64, b: f64, m: u32) -> (f64, f64) {
    let h = (b - a) / m as f64;
    let g = |t: f64| horner(c, t) / (x + t).powi(n as i32 + 1);
    let mut sum = g(a) + g(b);
    let mut max_abs = g(a).abs().max(g(b).abs());
    for i in 1..m {
        let t = a + i as f64 * h;
        let v = g(t);
        max_abs = max_abs.max(v.abs());
        sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let value = sum * h / 3.0;
    let truncation = SAFETY * (b - a) * h.powi(4) / 180.0 * fourth_derivative_bound(n, x + a.min(0.0));
    let rounding = 8.0 * f64::EPSILON * (m as f64) * h * max_abs;
    (value, truncation + rounding)
}

/// `R_N(x) = ∫_{−λ}^{1−λ} B_N({t})/(x+t)^{N+1} dt` by composite Simpson on the
/// two polynomial pieces `[−λ, 0)` and `[0, 1−λ]`, `subdivisions` panels each.
///
/// The radius is an estimate (fourth-derivative bound times a safety factor),
/// not a certificate.
pub fn quadrature_r_n(spec: &TruncationSpec, x: &Rational, subdivisions: u32) -> Result<QuadratureResult> {
    let lam = spec.lambda();
    if *x <= Rational::from(lam + 1u32) {
        return Err(Error::Domain(format!("quadrature needs x > λ + 1, got x = {x}, λ = {lam}")));
    }
    if subdivisions < 2 {
        return Err(Error::Domain("quadrature needs at least 2 subdivisions".into()));
    }
    let m = subdivisions + subdivisions % 2;
    let n = spec.n();
    let (xf, lf) = (x.to_f64(), lam.to_f64());
    let mut value = 0.0;
    let mut radius = 0.0;
    if lf > 0.0 {
        let (v, r) = simpson(&f64_poly(n, 1.0), n, xf, -lf, 0.0, m);
        value += v;
        radius += r;
    }
    let (v, r) = simpson(&f64_poly(n, 0.0), n, xf, 0.0, 1.0 - lf, m);
    value += v;
    radius += r;
    Ok(QuadratureResult {
        value,
        radius,
        subdivisions: m,
    })
}

fn spec_params(spec: &TruncationSpec) -> Value {
    json!({"lambda": spec.lambda().to_string(), "n": spec.n()})
}

/// Checks that `R_N(x)` has the sign that makes the truncation a bound:
/// positive for a lower bound on `ψ`, negative for an upper bound.
pub fn check_remainder_sign(spec: &TruncationSpec, x: &Rational) -> Result<CheckRecord> {
    let dir = validity(spec.n(), spec.lambda())?;
    if dir == BoundDirection::Invalid {
        return Err(Error::InvalidTruncation {
            n: spec.n(),
            lambda: spec.lambda().to_string(),
            reason: "remainder sign is only asserted for valid truncations".into(),
        });
    }
    let want = if dir == BoundDirection::LowerBound { 1.0 } else { -1.0 };
    let mut params = spec_params(spec);
    params["x"] = json!(x.to_string());
    let mut m = 16;
    loop {
        let q = quadrature_r_n(spec, x, m)?;
        if q.value.abs() > q.radius {
            let ok = q.value.signum() == want;
            let detail = format!("R_N = {:e} ± {:e} ({} panels), expected {}", q.value, q.radius, q.subdivisions, dir);
            return Ok(CheckRecord::new("remainder_sign", params, Status::of(ok), detail));
        }
        if m >= MAX_SUBDIVISIONS {
            let detail = format!("R_N = {:e} ± {:e} unresolved at {} panels", q.value, q.radius, m);
            return Ok(CheckRecord::new("remainder_sign", params, Status::Inconclusive, detail));
        }
        m *= 2;
    }
}

/// `F_N(x+1) − F_N(x) − 1/x` against the quadrature value of `R_N(x)`.
pub fn check_functional_identity(spec: &TruncationSpec, x: &Rational) -> Result<CheckRecord> {
    let q = quadrature_r_n(spec, x, 256)?;
    let f1 = eval_f(spec, &Rational::from(x + 1u32), PREC)?;
    let f0 = eval_f(spec, x, PREC)?;
    let lhs = f1.sub(&f0).sub(&Enclosure::from_rational(&Rational::from(x.recip_ref()), PREC));
    let diff = (lhs.mid().to_f64() - q.value).abs();
    let allowed = q.radius + lhs.width().to_f64() + 4.0 * f64::EPSILON * q.value.abs();
    let mut params = spec_params(spec);
    params["x"] = json!(x.to_string());
    Ok(CheckRecord::new(
        "functional_identity",
        params,
        Status::of(diff <= allowed),
        format!("|F(x+1) − F(x) − 1/x − R_N| = {diff:e}, allowed {allowed:e}"),
    ))
}

fn psi_tight(x: &Rational, eps: &Float) -> Result<Enclosure> {
    Ok(enclose(&Query::with_eps(Target::Psi(0), x.clone(), eps.clone()))?.0)
}

fn eps_ladder() -> impl Iterator<Item = Float> {
    [20, 30, 40].into_iter().map(|d| Float::with_val(64, Float::i_pow_u(10, d)).recip())
}

/// Tightens the tolerance from 1e−20 down to 1e−40 until `f` yields an
/// enclosure with a certified sign.
fn resolve_sign(mut f: impl FnMut(&Float) -> Result<Enclosure>) -> Result<(Sign, Enclosure)> {
    let mut last = None;
    for eps in eps_ladder() {
        let e = f(&eps)?;
        let s = Sign::of(&e);
        if s != Sign::Indeterminate {
            return Ok((s, e));
        }
        last = Some(e);
    }
    Ok((Sign::Indeterminate, last.expect("ladder is nonempty")))
}

fn bits_for(eps: &Float) -> Precision {
    let b = -Float::with_val(64, eps.log2_ref()).to_f64();
    (b.max(0.0) as Precision) + 96
}

/// `ψ(x) − F_N(λ; x) = Σ_{j≥0} R_N(x+j)`, checked with `periods` quadratures
/// plus the tail bound `max|B_N| / (N (x + periods − λ)^N)`.
pub fn check_tail_representation(spec: &TruncationSpec, x: &Rational, periods: u32) -> Result<CheckRecord> {
    let mut sum = 0.0;
    let mut radius = 0.0;
    let mut xj = x.clone();
    for _ in 0..periods {
        let q = quadrature_r_n(spec, &xj, 64)?;
        sum += q.value;
        radius += q.radius + f64::EPSILON * q.value.abs();
        xj += 1u32;
    }
    let n = spec.n();
    let tail = abs_sum(n) / (n as f64 * (Rational::from(&xj - spec.lambda())).to_f64().powi(n as i32));
    let eps = Float::with_val(64, 1e-30);
    let psi = psi_tight(x, &eps)?;
    let d = psi.sub(&eval_f(spec, x, PREC)?);
    let discrepancy = (d.mid().to_f64() - sum).abs();
    let allowed = radius + tail + d.width().to_f64() + 4.0 * f64::EPSILON * sum.abs();
    let mut params = spec_params(spec);
    params["x"] = json!(x.to_string());
    params["periods"] = json!(periods);
    Ok(CheckRecord::new(
        "tail_representation",
        params,
        Status::of(discrepancy <= allowed),
        format!("ψ − F_N = {:e}, quadrature sum {sum:e}, discrepancy {discrepancy:e}, allowed {allowed:e} (tail {tail:e})",
            d.mid().to_f64()),
    ))
}

fn log_gamma_derivative(m: u32, x: &Rational, eps: &Float) -> Result<Enclosure> {
    let target = if m == 0 { Target::LogGamma } else { Target::Psi(m - 1) };
    Ok(enclose(&Query::with_eps(target, x.clone(), eps.clone()))?.0)
}

/// For `m = 0..=m_max`, the signs of
/// `(−1)^{⌈N/2⌉+m} ((log Γ)^{(m)}(x) − L_N^{(m)}(λ; x))` on the grid. Complete
/// monotonicity predicts `+` everywhere.
pub fn check_complete_monotonicity(spec: &TruncationSpec, m_max: u32, grid: &[Rational]) -> Result<Vec<SignReport>> {
    if !validity(spec.n(), spec.lambda())?.is_valid() {
        return Err(Error::InvalidTruncation {
            n: spec.n(),
            lambda: spec.lambda().to_string(),
            reason: "complete monotonicity is only asserted for valid truncations".into(),
        });
    }
    let base = spec.n().div_ceil(2);
    let mut out = Vec::new();
    for m in 0..=m_max {
        let mut signs = Vec::new();
        for x in grid {
            let (s, _) = resolve_sign(|eps| {
                let t = log_gamma_derivative(m, x, eps)?;
                Ok(t.sub(&eval_l_derivative(spec, m, x, bits_for(eps))?))
            })?;
            signs.push(if (base + m) % 2 == 0 { s } else { s.flip() });
        }
        out.push(SignReport::new(grid.to_vec(), signs));
    }
    Ok(out)
}

/// Signs of `ψ(x) − F_N(λ; x)` along an ascending grid.
pub fn find_sign_change(spec: &TruncationSpec, grid: &[Rational]) -> Result<SignReport> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly ascending".into()));
    }
    let mut signs = Vec::new();
    for x in grid {
        spec.offset(x)?;
        let (s, _) = resolve_sign(|eps| Ok(psi_tight(x, eps)?.sub(&eval_f(spec, x, bits_for(eps))?)))?;
        signs.push(s);
    }
    Ok(SignReport::new(grid.to_vec(), signs))
}

fn gamma_tight(x: &Rational) -> Result<Enclosure> {
    let mag = rough_log_gamma(x.to_f64());
    let eps = Float::with_val(64, mag - 30.0 * std::f64::consts::LN_10).exp();
    Ok(enclose(&Query::with_eps(Target::Gamma, x.clone(), eps))?.0)
}

fn sonin(n: u32, x: &Rational, prec: Precision) -> Result<Enclosure> {
    eval_gamma_n(n, x, prec)
}

/// `Γ_{2N−1}(x) < Γ(x) < Γ_{2N}(x)` certified at every grid point.
pub fn gamma_sandwich_check(n: u32, grid: &[Rational]) -> Result<CheckRecord> {
    if n == 0 {
        return Err(Error::Domain("sandwich index N must be at least 1".into()));
    }
    let half = Rational::from((1, 2));
    let mut status = Status::Pass;
    let mut notes = Vec::new();
    for x in grid {
        if *x <= half {
            return Err(Error::Domain(format!("sandwich grid point {x} must exceed 1/2")));
        }
        let g = gamma_tight(x)?;
        let mut point = Status::Inconclusive;
        for prec in [PREC, 2 * PREC] {
            let lo = sonin(2 * n - 1, x, prec)?;
            let hi = sonin(2 * n, x, prec)?;
            if lo.hi() < g.lo() && g.hi() < hi.lo() {
                point = Status::Pass;
                break;
            }
            if lo.lo() >= g.hi() || hi.hi() <= g.lo() {
                point = Status::Fail;
                break;
            }
        }
        status = status.and(point);
        notes.push(format!("x={x}: {point}"));
    }
    Ok(CheckRecord::new(
        "gamma_sandwich",
        json!({"n": n, "grid": grid.iter().map(|r| r.to_string()).collect::<Vec<_>>()}),
        status,
        notes.join(", "),
    ))
}

/// `[Γ_{2N+1}, Γ_{2N+2}] ⊂ [Γ_{2N−1}, Γ_{2N}]` certified at every grid point.
pub fn sandwich_nesting_check(n: u32, grid: &[Rational]) -> Result<CheckRecord> {
    if n == 0 {
        return Err(Error::Domain("sandwich index N must be at least 1".into()));
    }
    let mut status = Status::Pass;
    let mut notes = Vec::new();
    for x in grid {
        let outer_lo = sonin(2 * n - 1, x, PREC)?;
        let outer_hi = sonin(2 * n, x, PREC)?;
        let inner_lo = sonin(2 * n + 1, x, PREC)?;
        let inner_hi = sonin(2 * n + 2, x, PREC)?;
        let point = if outer_lo.hi() <= inner_lo.lo() && inner_hi.hi() <= outer_hi.lo() {
            Status::Pass
        } else if outer_lo.lo() > inner_lo.hi() || inner_hi.lo() > outer_hi.hi() {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        status = status.and(point);
        notes.push(format!(
            "x={x}: outer [{:.7e}, {:.7e}] inner [{:.7e}, {:.7e}] {point}",
            outer_lo.mid(),
            outer_hi.mid(),
            inner_lo.mid(),
            inner_hi.mid()
        ));
    }
    Ok(CheckRecord::new(
        "sandwich_nesting",
        json!({"n": n, "grid": grid.iter().map(|r| r.to_string()).collect::<Vec<_>>()}),
        status,
        notes.join("; "),
    ))
}

/// `ψ(x+1) − ψ(y+1) = Σ_{n≥1} (1/(n+y) − 1/(n+x))` from `terms` exact terms
/// plus an integral-comparison tail. Independent of the engine.
pub fn weierstrass_psi_diff(x: &Rational, y: &Rational, terms: u64, prec: Precision) -> Result<Enclosure> {
    if x.cmp0() == Ordering::Less || y.cmp0() == Ordering::Less {
        return Err(Error::Domain(format!("series oracle needs x, y ≥ 0, got {x}, {y}")));
    }
    if terms == 0 {
        return Err(Error::Domain("series oracle needs at least one term".into()));
    }
    match x.cmp(y) {
        Ordering::Equal => Ok(Enclosure::zero(prec)),
        Ordering::Less => Ok(weierstrass_psi_diff(y, x, terms, prec)?.neg()),
        Ordering::Greater => {
            let dxy = Rational::from(x - y);
            let mut acc = Enclosure::zero(prec);
            for n in 1..=terms {
                let a = Rational::from(x + n);
                let b = Rational::from(y + n);
                let term = Rational::from(&dxy / (a * b));
                acc = acc.add(&Enclosure::from_rational(&term, prec));
            }
            // Terms decrease in n, so ∫_{T+1}^∞ ≤ tail ≤ ∫_T^∞ with
            // ∫_a^∞ = log((a+x)/(a+y)).
            let t = Rational::from(terms);
            let ratio = |a: Rational| {
                Rational::from(&a + x) / Rational::from(&a + y)
            };
            let lo = Enclosure::from_rational(&ratio(Rational::from(&t + 1u32)), prec).ln()?;
            let hi = Enclosure::from_rational(&ratio(t), prec).ln()?;
            let tail = Enclosure::new(lo.lo().clone(), hi.hi().clone())?;
            Ok(acc.add(&tail))
        }
    }
}

/// `|ψ(x) − log x| < 1/x` at every grid point, and decreasing along the grid.
pub fn check_psi_log_asymptote(grid: &[Rational]) -> Result<CheckRecord> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("grid must be strictly ascending".into()));
    }
    if grid.last().is_none_or(|x| *x < 10_000) {
        return Err(Error::Domain("asymptote grid must reach 10^4".into()));
    }
    let eps = Float::with_val(64, 1e-30);
    let mut prev: Option<Float> = None;
    let mut ok = true;
    let mut notes = Vec::new();
    for x in grid {
        let psi = psi_tight(x, &eps)?;
        let log_x = Enclosure::from_rational(x, PREC).ln()?;
        let gap = Float::with_val(PREC, psi.mid() - log_x.mid()).abs();
        let bound = Float::with_val(PREC, Rational::from(x.recip_ref()));
        let point = gap < bound && prev.as_ref().is_none_or(|p| gap < *p);
        ok &= point;
        notes.push(format!("x={x}: |ψ − log x| = {:.3e}", gap.to_f64()));
        prev = Some(gap);
    }
    Ok(CheckRecord::new(
        "psi_log_asymptote",
        json!({"grid": grid.iter().map(|r| r.to_string()).collect::<Vec<_>>()}),
        Status::of(ok),
        notes.join(", "),
    ))
}

/// The verification suites runnable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Bernoulli,
    Signs,
    Monotone,
    Sandwich,
    Oracle,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bernoulli" => Suite::Bernoulli,
            "signs" => Suite::Signs,
            "monotone" => Suite::Monotone,
            "sandwich" => Suite::Sandwich,
            "oracle" => Suite::Oracle,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

/// Runs a suite and returns its records in a fixed order.
pub fn run_suite(suite: Suite) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::Bernoulli => bernoulli_suite(),
        Suite::Signs => signs_suite(),
        Suite::Monotone => monotone_suite(),
        Suite::Sandwich => sandwich_suite(),
        Suite::Oracle => oracle_suite(),
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Bernoulli, Suite::Signs, Suite::Monotone, Suite::Sandwich, Suite::Oracle] {
                all.extend(run_suite(s)?);
            }
            Ok(all)
        }
    }
}

fn rat(s: &str) -> Rational {
    s.parse().expect("literal rational")
}

fn rats(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| rat(s)).collect()
}

/// `n` points from `a` to `b`, geometrically spaced and rounded to exact
/// decimals with six significant digits.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<Rational> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            let v = (la + (lb - la) * i as f64 / (n - 1) as f64).exp();
            crate::bernoulli::parse_rational(&format!("{v:.6e}")).expect("formatted decimal")
        })
        .collect()
}

/// `B_n(½) = −(1 − 2^{1−n}) B_n` for `n ≤ n_max`.
pub fn check_half_identity(n_max: u32) -> CheckRecord {
    let half = Rational::from((1, 2));
    let bad: Vec<u32> = (0..=n_max)
        .filter(|&n| {
            let factor = Rational::from(1) - Rational::from((1, 2)).pow_i(n as i32 - 1);
            eval_poly(n, &half) != -(factor * bernoulli_number(n))
        })
        .collect();
    CheckRecord::new(
        "bernoulli_half",
        json!({"n_max": n_max}),
        Status::of(bad.is_empty()),
        if bad.is_empty() { "exact equality for every n".to_string() } else { format!("mismatch at n = {bad:?}") },
    )
}

/// `B_{2N}(¼) = 2^{−2N} B_{2N}(½)` for `N ≤ n_max`.
pub fn check_quarter_identity(n_max: u32) -> CheckRecord {
    let (q, h) = (Rational::from((1, 4)), Rational::from((1, 2)));
    let bad: Vec<u32> = (1..=n_max)
        .filter(|&n| eval_poly(2 * n, &q) != eval_poly(2 * n, &h) * Rational::from((1, 4)).pow_i(n as i32))
        .collect();
    CheckRecord::new(
        "bernoulli_quarter",
        json!({"n_max": n_max}),
        Status::of(bad.is_empty()),
        if bad.is_empty() { "exact equality for every N".to_string() } else { format!("mismatch at N = {bad:?}") },
    )
}

/// Root brackets of `B_M` for even `M ≤ m_max`: each strictly below ¼, with
/// `¼ − hi` strictly decreasing in `M`.
pub fn check_lambda0_brackets(m_max: u32) -> Result<CheckRecord> {
    let quarter = Rational::from((1, 4));
    let tol = default_root_tolerance();
    let mut prev: Option<Rational> = None;
    let mut ok = true;
    let mut notes = Vec::new();
    for m in (2..=m_max).step_by(2) {
        let br = lambda0(m, &tol)?;
        let gap = Rational::from(&quarter - &br.hi);
        ok &= gap.cmp0() == Ordering::Greater && prev.as_ref().is_none_or(|p| gap < *p);
        notes.push(format!("M={m}: 1/4 − hi = {:.3e}", gap.to_f64()));
        prev = Some(gap);
    }
    Ok(CheckRecord::new("lambda0_brackets", json!({"m_max": m_max}), Status::of(ok), notes.join(", ")))
}

trait PowI {
    fn pow_i(self, k: i32) -> Rational;
}

impl PowI for Rational {
    fn pow_i(self, k: i32) -> Rational {
        use rug::ops::Pow;
        Pow::pow(self, k)
    }
}

fn bernoulli_suite() -> Result<Vec<CheckRecord>> {
    Ok(vec![check_half_identity(60), check_quarter_identity(50), check_lambda0_brackets(40)?])
}

/// The seven truncations whose remainder signs are tabulated.
pub fn sign_table_specs() -> Vec<TruncationSpec> {
    [(0, 1, 2), (0, 1, 4), (1, 2, 1), (1, 2, 3), (1, 4, 1), (1, 4, 3), (1, 8, 2)]
        .into_iter()
        .map(|(a, b, n)| TruncationSpec::of(a, b, n))
        .collect()
}

fn sign_record(name: &str, spec: &TruncationSpec, r: &SignReport, ok: bool) -> CheckRecord {
    let status = if ok {
        Status::Pass
    } else if r.has_indeterminate() {
        Status::Inconclusive
    } else {
        Status::Fail
    };
    let mut params = spec_params(spec);
    params["grid"] = json!(r.grid.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    let signs: String = r
        .signs
        .iter()
        .map(|s| match s {
            Sign::Positive => '+',
            Sign::Negative => '-',
            Sign::Indeterminate => '?',
        })
        .collect();
    let change = match &r.first_change {
        Some((a, b)) => format!("sign change in ({a}, {b})"),
        None => "no sign change".to_string(),
    };
    CheckRecord::new(name, params, status, format!("signs {signs}, {change}"))
}

fn signs_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for spec in sign_table_specs() {
        for x in ["2", "5", "20"] {
            out.push(check_remainder_sign(&spec, &rat(x))?);
        }
    }
    for (spec, x) in [(TruncationSpec::of(1, 2, 1), "5"), (TruncationSpec::of(0, 1, 2), "3"), (TruncationSpec::of(1, 4, 3), "7/2")] {
        out.push(check_functional_identity(&spec, &rat(x))?);
    }
    // The sign change of ψ − F_2(¼; ·) sits near x ≈ 0.2966, so the grid
    // starts just above λ.
    let grid = log_grid(0.26, 20.0, 24);
    let spec = TruncationSpec::of(1, 4, 2);
    let r = find_sign_change(&spec, &grid)?;
    let ok = r.first_change.is_some();
    out.push(sign_record("sign_change", &spec, &r, ok));
    let grid = log_grid(0.6, 20.0, 12);
    for (spec, want) in [(TruncationSpec::of(1, 2, 1), Sign::Positive), (TruncationSpec::of(1, 2, 3), Sign::Negative)] {
        let r = find_sign_change(&spec, &grid)?;
        let ok = r.all(want);
        out.push(sign_record("constant_sign", &spec, &r, ok));
    }
    Ok(out)
}

/// Grids used for the complete-monotonicity sampling.
pub fn monotone_cases() -> Vec<(TruncationSpec, Vec<Rational>)> {
    vec![
        (TruncationSpec::of(1, 2, 3), rats(&["3/4", "1", "2", "5", "10"])),
        (TruncationSpec::of(0, 1, 4), rats(&["1/2", "1", "2", "3", "10"])),
        (TruncationSpec::of(0, 1, 2), rats(&["1/2", "1", "2", "3", "10"])),
        (TruncationSpec::of(1, 4, 3), rats(&["1/2", "1", "2", "3", "10"])),
    ]
}

fn monotone_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (spec, grid) in monotone_cases() {
        for (m, r) in check_complete_monotonicity(&spec, 6, &grid)?.into_iter().enumerate() {
            let ok = r.all(Sign::Positive);
            let mut rec = sign_record("complete_monotonicity", &spec, &r, ok);
            rec.params["m"] = json!(m);
            out.push(rec);
        }
    }
    Ok(out)
}

/// Grid on which the Sonin sandwich is checked.
pub fn sandwich_grid() -> Vec<Rational> {
    rats(&["3/5", "1", "2", "7/2", "10"])
}

/// Grid on which nesting of consecutive sandwiches is checked. Near
/// `x = 1/2` the later approximants blow up, so nesting only sets in for
/// larger `x`.
pub fn nesting_grid() -> Vec<Rational> {
    rats(&["3", "7/2", "5", "10"])
}

fn sandwich_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push(gamma_sandwich_check(n, &sandwich_grid())?);
    }
    for n in 1..=3 {
        out.push(sandwich_nesting_check(n, &nesting_grid())?);
    }
    Ok(out)
}

/// Pairs `(x, y)` for the series oracle.
pub fn oracle_pairs() -> Vec<(Rational, Rational)> {
    [
        ("1", "0"),
        ("2", "1"),
        ("9", "0"),
        ("3/2", "1/2"),
        ("5", "2"),
        ("10", "1/3"),
        ("1/10", "0"),
        ("7/3", "5/4"),
        ("20", "3"),
        ("1/4", "1/2"),
    ]
    .into_iter()
    .map(|(a, b)| (rat(a), rat(b)))
    .collect()
}

/// Engine `ψ(x+1) − ψ(y+1)` against [`weierstrass_psi_diff`].
pub fn check_oracle_pair(x: &Rational, y: &Rational, terms: u64) -> Result<CheckRecord> {
    let eps = Float::with_val(64, 1e-25);
    let a = psi_tight(&Rational::from(x + 1u32), &eps)?;
    let b = psi_tight(&Rational::from(y + 1u32), &eps)?;
    let engine = a.sub(&b);
    let oracle = weierstrass_psi_diff(x, y, terms, 128)?;
    Ok(CheckRecord::new(
        "weierstrass_oracle",
        json!({"x": x.to_string(), "y": y.to_string(), "terms": terms}),
        Status::of(engine.intersects(&oracle)),
        format!("engine {engine}, oracle {oracle}"),
    ))
}

/// `ψ(2) − ψ(1)` contains 1 with width at most `1e−25`.
pub fn check_unit_step() -> Result<CheckRecord> {
    let eps = Float::with_val(64, 5e-26);
    let d = psi_tight(&rat("2"), &eps)?.sub(&psi_tight(&rat("1"), &eps)?);
    let ok = d.contains_rational(&rat("1")) && d.width() <= Float::with_val(64, 1e-25);
    Ok(CheckRecord::new("unit_step", json!({"x": "2", "y": "1"}), Status::of(ok), format!("ψ(2) − ψ(1) ∈ {d}")))
}

fn oracle_suite() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (x, y) in oracle_pairs() {
        out.push(check_oracle_pair(&x, &y, 20_000)?);
    }
    out.push(check_unit_step()?);
    out.push(check_psi_log_asymptote(&rats(&["10", "100", "1000", "10000", "1000000"]))?);
    for (spec, x, p) in [
        (TruncationSpec::of(1, 2, 2), "5", 50),
        (TruncationSpec::of(0, 1, 2), "10", 100),
        (TruncationSpec::of(1, 2, 1), "2", 200),
    ] {
        out.push(check_tail_representation(&spec, &rat(x), p)?);
    }
    Ok(out)
}
