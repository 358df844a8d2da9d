//! Certified enclosures of `ψ^{(m)}`, `log Γ` and `Γ` on `x > 0`.
//!
//! The argument is shifted by the recurrence
//! `target(x) = target(x + K) − C(x, K)` until the asymptotic truncations are
//! sharp, then bracketed between a lower and an upper truncation of opposite
//! direction. The planner picks `(N_lower, N_upper, K)`; [`enclose`] runs the
//! plan and escalates when the measured width misses the tolerance.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::bernoulli::{eval_poly, invalidity_reason, validity, BoundDirection};
use crate::enclosure::{Enclosure, Precision};
use crate::error::{Error, Result};
use crate::expansions::{eval_l_derivative, TruncationSpec};

const TERM_WEIGHT: f64 = 32.0;
const MAX_K: u64 = 1 << 24;
const MAX_N: u32 = 4000;
const MAX_ESCALATIONS: u32 = 64;
const GUARD_BITS: f64 = 32.0;

/// The function being enclosed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `ψ^{(m)}`, so `Psi(0)` is the digamma function.
    Psi(u32),
    LogGamma,
    Gamma,
}

impl Target {
    /// Order of the derivative of `log Γ` this target corresponds to.
    /// `Gamma` is enclosed through `log Γ`.
    pub fn log_gamma_order(self) -> u32 {
        match self {
            Target::Psi(m) => m + 1,
            Target::LogGamma | Target::Gamma => 0,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Psi(0) => write!(f, "psi"),
            Target::Psi(m) => write!(f, "psi({m})"),
            Target::LogGamma => write!(f, "lgamma"),
            Target::Gamma => write!(f, "gamma"),
        }
    }
}

/// One enclosure request. `lambda`, `n`, `k` and `precision` override the
/// planner when set.
#[derive(Clone, Debug)]
pub struct Query {
    pub target: Target,
    pub x: Rational,
    pub eps: Float,
    pub lambda: Option<Rational>,
    pub n: Option<u32>,
    pub k: Option<u64>,
    pub precision: Option<Precision>,
}

impl Query {
    pub fn new(target: Target, x: Rational, eps: f64) -> Self {
        Self::with_eps(target, x, Float::with_val(64, eps))
    }

    pub fn with_eps(target: Target, x: Rational, eps: Float) -> Self {
        Self {
            target,
            x,
            eps,
            lambda: None,
            n: None,
            k: None,
            precision: None,
        }
    }

    pub fn lambda(mut self, lambda: Rational) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn precision(mut self, bits: Precision) -> Self {
        self.precision = Some(bits);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.x.cmp0() != Ordering::Greater {
            return Err(Error::Domain(format!("x = {} must be positive", self.x)));
        }
        if !self.eps.is_finite() || self.eps.cmp0() != Some(Ordering::Greater) {
            return Err(Error::Domain(format!("tolerance {} must be positive and finite", self.eps)));
        }
        if let Some(l) = &self.lambda {
            TruncationSpec::new(l.clone(), 1)?;
        }
        if self.n == Some(0) {
            return Err(Error::Domain("truncation order N must be at least 1".into()));
        }
        if let Some(p) = self.precision {
            if !(rug::float::prec_min()..=rug::float::prec_max()).contains(&p) {
                return Err(Error::Domain(format!("precision {p} bits is out of range")));
            }
        }
        Ok(())
    }
}

/// Parameters of one evaluation: the bracketing truncations, the shift and
/// the working precision.
#[derive(Clone, Debug, Serialize)]
pub struct Plan {
    #[serde(serialize_with = "ser_rational")]
    pub lambda: Rational,
    pub n_lower: u32,
    pub n_upper: u32,
    pub k: u64,
    pub precision: Precision,
    /// Predicted distance between the two bounds at `x + K`.
    #[serde(serialize_with = "ser_float")]
    pub predicted_gap: Float,
    /// Absolute tolerance applied to `log Γ` when the target is `Γ`.
    #[serde(serialize_with = "ser_opt_float")]
    pub log_eps: Option<Float>,
}

impl Plan {
    pub fn lower_spec(&self) -> TruncationSpec {
        TruncationSpec::new(self.lambda.clone(), self.n_lower).expect("plan holds a valid λ")
    }

    pub fn upper_spec(&self) -> TruncationSpec {
        TruncationSpec::new(self.lambda.clone(), self.n_upper).expect("plan holds a valid λ")
    }

    /// Number of nonzero terms in the longer of the two series.
    pub fn series_terms(&self) -> u32 {
        let n = self.n_lower.max(self.n_upper);
        (1..=n).filter(|&k| eval_poly(k, &self.lambda).cmp0() != Ordering::Equal).count() as u32
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_float<S: serde::Serializer>(f: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string_radix(10, Some(6)))
}

fn ser_opt_float<S: serde::Serializer>(f: &Option<Float>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match f {
        Some(f) => ser_float(f, s),
        None => s.serialize_none(),
    }
}

/// Direction in which the `d`-th derivative of `L_N(λ; ·)` bounds
/// `(log Γ)^{(d)}`.
pub fn derivative_direction(spec: &TruncationSpec, d: u32) -> BoundDirection {
    let v = spec.validity();
    if d % 2 == 1 {
        v
    } else {
        v.flipped()
    }
}

fn require_valid(spec: &TruncationSpec) -> Result<()> {
    match invalidity_reason(spec.n(), spec.lambda())? {
        None => Ok(()),
        Some(reason) => Err(Error::InvalidTruncation {
            n: spec.n(),
            lambda: spec.lambda().to_string(),
            reason,
        }),
    }
}

fn side(dir: BoundDirection, e: &Enclosure) -> Float {
    match dir {
        BoundDirection::LowerBound => e.lo().clone(),
        _ => e.hi().clone(),
    }
}

/// One-sided bound on `ψ(x)` from `F_N(λ; x)`: the lower endpoint of the
/// enclosure for a lower bound, the upper endpoint for an upper bound.
pub fn bound_psi_side(spec: &TruncationSpec, x: &Rational, prec: Precision) -> Result<(BoundDirection, Float)> {
    bound_derivative_side(spec, 1, x, prec)
}

/// One-sided bound on `(log Γ)^{(d)}(x)` from `L_N^{(d)}(λ; x)`.
pub fn bound_derivative_side(
    spec: &TruncationSpec,
    d: u32,
    x: &Rational,
    prec: Precision,
) -> Result<(BoundDirection, Float)> {
    require_valid(spec)?;
    let dir = derivative_direction(spec, d);
    let e = eval_l_derivative(spec, d, x, prec)?;
    Ok((dir, side(dir, &e)))
}

/// `C(x, K)` with `target(x) = target(x + K) − C(x, K)`.
///
/// `ψ`: `Σ 1/(x+j)`; `ψ^{(m)}`: `Σ (−1)^m m!/(x+j)^{m+1}`; `log Γ`: the log
/// of the exact product `Π (x+j)`. Sums run over `0 ≤ j < K`.
pub fn shift_sum(target: Target, x: &Rational, k: u64, prec: Precision) -> Result<Enclosure> {
    if x.cmp0() != Ordering::Greater {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    if k == 0 {
        return Ok(Enclosure::zero(prec));
    }
    match target {
        Target::LogGamma | Target::Gamma => {
            let mut p = Rational::from(1);
            let mut xj = x.clone();
            for _ in 0..k {
                p *= &xj;
                xj += 1u32;
            }
            Enclosure::from_rational(&p, prec).ln()
        }
        Target::Psi(m) => {
            let mut num = Integer::from(Integer::factorial(m));
            if m % 2 == 1 {
                num = -num;
            }
            let num = Rational::from(num);
            let mut acc = Enclosure::zero(prec);
            let mut xj = x.clone();
            for _ in 0..k {
                let term = Rational::from(&num / Rational::from((&xj).pow(m + 1)));
                acc = acc.add(&Enclosure::from_rational(&term, prec));
                xj += 1u32;
            }
            Ok(acc)
        }
    }
}

/// Rough `log Γ(x)` in double precision, used to scale tolerances.
pub fn rough_log_gamma(x: f64) -> f64 {
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let x2 = x * x;
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
}

fn ln_float(f: &Float) -> f64 {
    Float::with_val(64, f.ln_ref()).to_f64()
}

fn ln_rational(r: &Rational) -> f64 {
    ln_float(&Float::with_val(128, r))
}

/// `ln |coefficient_n · (n−1)_d|` of the `d`-th derivative series, and the
/// exponent of `Y` the term carries: term `n` is `exp(a_n) · Y^{e_n}`.
struct TermModel {
    lambda: Rational,
    d: u32,
    ln_coeff: HashMap<u32, f64>,
}

impl TermModel {
    fn new(lambda: &Rational, d: u32) -> Self {
        Self {
            lambda: lambda.clone(),
            d,
            ln_coeff: HashMap::new(),
        }
    }

    fn ln_coeff(&mut self, n: u32) -> f64 {
        if let Some(v) = self.ln_coeff.get(&n) {
            return *v;
        }
        let b = eval_poly(n, &self.lambda);
        let v = if b.cmp0() == Ordering::Equal {
            f64::NEG_INFINITY
        } else {
            // |B_n(λ)| (n−1)_d / (n(n−1)); for d = 0 the rising factorial is 1.
            let mut r = Rational::from(b.abs_ref());
            r /= Integer::from(n) * (n - 1);
            if self.d > 0 {
                r *= crate::expansions::rising_factorial(n - 1, self.d);
            }
            ln_rational(&r)
        };
        self.ln_coeff.insert(n, v);
        v
    }

    /// `ln Σ_{n ∈ (a, b]} |term_n(Y)|`.
    fn ln_gap(&mut self, a: u32, b: u32, ln_y: f64) -> f64 {
        let logs: Vec<f64> = (a + 1..=b)
            .map(|n| self.ln_coeff(n) + (1.0 - n as f64 - self.d as f64) * ln_y)
            .collect();
        log_sum_exp(&logs)
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Next valid `N' > n` bounding in the opposite direction to `dir`.
fn partner(lambda: &Rational, n: u32, dir: BoundDirection) -> Result<Option<u32>> {
    for m in n + 1..=MAX_N {
        let v = validity(m, lambda)?;
        if v.is_valid() && v != dir {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn next_valid(lambda: &Rational, from: u32) -> Result<Option<(u32, BoundDirection)>> {
    for m in from..=MAX_N {
        let v = validity(m, lambda)?;
        if v.is_valid() {
            return Ok(Some((m, v)));
        }
    }
    Ok(None)
}

/// Smallest `K ≥ floor` with `x + K − λ` large enough that the predicted gap
/// of `(a, b)` is below `target_ln` (natural log).
fn k_min(model: &mut TermModel, a: u32, b: u32, x: f64, lambda: f64, floor: u64, target_ln: f64) -> Option<u64> {
    let ok = |k: u64, model: &mut TermModel| model.ln_gap(a, b, (x + k as f64 - lambda).ln()) < target_ln;
    if ok(floor, model) {
        return Some(floor);
    }
    let mut step = 1u64;
    let mut lo = floor;
    let hi = loop {
        let k = floor + step;
        if k > MAX_K {
            return None;
        }
        if ok(k, model) {
            break k;
        }
        lo = k;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid, model) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Smallest shift with `x + K > λ + 1`.
fn k_floor(x: &Rational, lambda: &Rational) -> u64 {
    let t = Rational::from(lambda + 1u32) - x;
    if t.cmp0() == Ordering::Less {
        0
    } else {
        let f = t.floor_ref();
        Integer::from(f).to_u64().unwrap_or(u64::MAX) + 1
    }
}

fn to_f64_clamped(r: &Rational) -> f64 {
    r.to_f64()
}

/// Bits needed to resolve `eps` against values of size `exp(mag_ln)`, with
/// room for the rounding of `steps` operations.
fn precision_for(ln_eps: f64, mag_ln: f64, steps: u64) -> Precision {
    let bits = (mag_ln.max(0.0) - ln_eps) / std::f64::consts::LN_2 + GUARD_BITS + 2.0 * ((steps + 2) as f64).log2();
    (bits.ceil() as Precision).max(64)
}

fn magnitude_ln(target: Target, x: f64, k: u64) -> f64 {
    let y = x + k as f64;
    match target {
        Target::LogGamma | Target::Gamma => (y * y.ln().abs() + y + 1.0).ln(),
        Target::Psi(0) => (y.ln().abs() + (k as f64 + 1.0) / x).ln(),
        Target::Psi(m) => {
            let fact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
            fact - (m as f64 + 1.0) * x.ln().min(0.0) + ((k + 1) as f64).ln()
        }
    }
}

fn lower_upper(a: u32, da: BoundDirection, b: u32, d: u32) -> (u32, u32) {
    // `da` is the ψ-direction of `a`; convert to the direction for order d.
    let dir_a = if d % 2 == 1 { da } else { da.flipped() };
    if dir_a == BoundDirection::LowerBound {
        (a, b)
    } else {
        (b, a)
    }
}

/// Tolerance that the planner works to, in natural log.
fn ln_target(eps: &Float) -> f64 {
    ln_float(eps) - 4f64.ln()
}

/// Choose `(N_lower, N_upper, K, precision)` for a query without evaluating.
pub fn plan(q: &Query) -> Result<Plan> {
    q.validate()?;
    let (eps, log_eps) = match q.target {
        Target::Gamma => {
            let lg = rough_log_gamma(to_f64_clamped(&q.x));
            let mut e = Float::with_val(64, &q.eps / 2u32);
            e *= Float::with_val(64, -lg).exp();
            (e.clone(), Some(e))
        }
        _ => (q.eps.clone(), None),
    };
    plan_with_eps(q, &eps, log_eps)
}

fn plan_with_eps(q: &Query, eps: &Float, log_eps: Option<Float>) -> Result<Plan> {
    let lambda = q.lambda.clone().unwrap_or_else(|| Rational::from((1, 2)));
    let d = q.target.log_gamma_order();
    let x = to_f64_clamped(&q.x);
    let lam = lambda.to_f64();
    let floor = k_floor(&q.x, &lambda);
    let target_ln = ln_target(eps);
    let mut model = TermModel::new(&lambda, d);

    if let Some(k) = q.k {
        if Rational::from(&q.x + k) <= lambda {
            return Err(Error::Domain(format!(
                "x + K = {} must exceed λ = {lambda}",
                Rational::from(&q.x + k)
            )));
        }
    }

    // Candidate pairs (a, b) with a < b.
    let (a, b, k) = match q.n {
        Some(n) => {
            let spec = TruncationSpec::new(lambda.clone(), n)?;
            require_valid(&spec)?;
            let b = partner(&lambda, n, spec.validity())?.ok_or_else(|| {
                Error::Domain(format!("no valid partner truncation above N = {n} for λ = {lambda}"))
            })?;
            let k = match q.k {
                Some(k) => k,
                None => k_min(&mut model, n, b, x, lam, floor, target_ln).unwrap_or(MAX_K),
            };
            (n, b, k)
        }
        None => match q.k {
            Some(k) => choose_pair_fixed_k(&mut model, &lambda, x + k as f64 - lam, target_ln)
                .map(|(a, b)| (a, b, k))?,
            None => choose_pair_free(&mut model, &lambda, x, lam, floor, target_ln)?,
        },
    };

    let da = validity(a, &lambda)?;
    let (n_lower, n_upper) = lower_upper(a, da, b, d);
    let ln_y = (x + k as f64 - lam).ln();
    let gap_ln = model.ln_gap(a, b, ln_y);
    let precision = match q.precision {
        Some(p) => p,
        None => precision_for(ln_float(eps), magnitude_ln(q.target, x, k), b as u64 + k),
    };
    let predicted_gap = Float::with_val(64, gap_ln).exp();
    Ok(Plan {
        lambda,
        n_lower,
        n_upper,
        k,
        precision,
        predicted_gap,
        log_eps,
    })
}

/// Pairs `(a, partner(a))` in increasing `a`.
fn pairs(lambda: &Rational) -> impl Iterator<Item = Result<(u32, u32)>> + '_ {
    let mut from = 1u32;
    std::iter::from_fn(move || {
        let (a, dir) = match next_valid(lambda, from) {
            Ok(Some(v)) => v,
            Ok(None) => return None,
            Err(e) => return Some(Err(e)),
        };
        from = a + 1;
        partner(lambda, a, dir).transpose().map(|r| r.map(|b| (a, b)))
    })
}

/// With the shift fixed: the first pair whose gap meets the target, or the
/// pair with the smallest gap once the series starts to diverge.
fn choose_pair_fixed_k(model: &mut TermModel, lambda: &Rational, y: f64, target_ln: f64) -> Result<(u32, u32)> {
    let ln_y = y.ln();
    let mut best: Option<(f64, u32, u32)> = None;
    let mut worse = 0;
    for pair in pairs(lambda) {
        let (a, b) = pair?;
        let g = model.ln_gap(a, b, ln_y);
        if g < target_ln {
            return Ok((a, b));
        }
        match best {
            Some((bg, _, _)) if g >= bg => {
                worse += 1;
                if worse > 8 {
                    break;
                }
            }
            _ => {
                best = Some((g, a, b));
                worse = 0;
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
        .ok_or_else(|| Error::Domain(format!("no valid truncation pair for λ = {lambda}")))
}

/// Minimize `K + w·N_upper` over pairs.
fn choose_pair_free(
    model: &mut TermModel,
    lambda: &Rational,
    x: f64,
    lam: f64,
    floor: u64,
    target_ln: f64,
) -> Result<(u32, u32, u64)> {
    let mut best: Option<(f64, u32, u32, u64)> = None;
    for pair in pairs(lambda) {
        let (a, b) = pair?;
        if let Some((cost, ..)) = best {
            if TERM_WEIGHT * a as f64 > cost {
                break;
            }
        }
        if let Some(k) = k_min(model, a, b, x, lam, floor, target_ln) {
            let cost = k as f64 + TERM_WEIGHT * b as f64;
            if best.is_none_or(|(c, ..)| cost < c) {
                best = Some((cost, a, b, k));
            }
        }
    }
    best.map(|(_, a, b, k)| (a, b, k))
        .ok_or_else(|| Error::Domain(format!("no truncation pair reaches the tolerance for λ = {lambda}")))
}

/// Optimal truncation at `y = x + K − λ`: the pair with the smallest
/// predicted gap.
pub fn optimal_pair(target: Target, lambda: &Rational, y: f64) -> Result<(u32, u32)> {
    let mut model = TermModel::new(lambda, target.log_gamma_order());
    choose_pair_fixed_k(&mut model, lambda, y, f64::NEG_INFINITY)
}

struct Attempt {
    value: Enclosure,
    rounding: Float,
}

fn attempt(q: &Query, plan: &Plan) -> Result<Attempt> {
    let d = q.target.log_gamma_order();
    let p = plan.precision;
    let xk = Rational::from(&q.x + plan.k);
    let lo_spec = plan.lower_spec();
    let hi_spec = plan.upper_spec();
    require_valid(&lo_spec)?;
    require_valid(&hi_spec)?;
    if derivative_direction(&lo_spec, d) != BoundDirection::LowerBound
        || derivative_direction(&hi_spec, d) != BoundDirection::UpperBound
    {
        return Err(Error::Inconsistent(format!(
            "plan pairs N = {} and N = {} with the wrong directions",
            plan.n_lower, plan.n_upper
        )));
    }
    let lo_e = eval_l_derivative(&lo_spec, d, &xk, p)?;
    let hi_e = eval_l_derivative(&hi_spec, d, &xk, p)?;
    let c = shift_sum(q.target, &q.x, plan.k, p)?;
    let lo = Float::with_val_round(p, lo_e.lo() - c.hi(), Round::Down).0;
    let hi = Float::with_val_round(p, hi_e.hi() - c.lo(), Round::Up).0;
    if lo > hi {
        return Err(Error::Inconsistent(format!(
            "lower bound {lo} exceeds upper bound {hi} at x = {}",
            q.x
        )));
    }
    let mut rounding = lo_e.width();
    rounding += hi_e.width();
    rounding += c.width();
    Ok(Attempt {
        value: Enclosure::new(lo, hi)?,
        rounding,
    })
}

fn escalate(q: &Query, plan: &mut Plan, att: &Attempt, eps: &Float, raise_n: &mut bool) -> Result<bool> {
    let d = q.target.log_gamma_order();
    let half = Float::with_val(64, eps / 2u32);
    if att.rounding > half {
        if q.precision.is_some() {
            return Ok(false);
        }
        plan.precision = plan.precision.saturating_mul(2).min(rug::float::prec_max());
        return Ok(true);
    }
    let can_k = q.k.is_none() && plan.k < MAX_K;
    let can_n = q.n.is_none();
    let use_n = if can_k && can_n { *raise_n } else { can_n };
    *raise_n = !*raise_n;
    if use_n {
        let b = plan.n_lower.max(plan.n_upper);
        let db = validity(b, &plan.lambda)?;
        let Some(c) = partner(&plan.lambda, b, db)? else {
            return Ok(false);
        };
        let (lo, hi) = lower_upper(b, db, c, d);
        plan.n_lower = lo;
        plan.n_upper = hi;
        let steps = c as u64 + plan.k;
        plan.precision = plan.precision.max(precision_for(
            ln_float(eps),
            magnitude_ln(q.target, q.x.to_f64(), plan.k),
            steps,
        ));
        Ok(true)
    } else if can_k {
        plan.k = (plan.k.max(1) * 2).min(MAX_K);
        Ok(true)
    } else {
        Ok(false)
    }
}

fn run(q: &Query, mut plan: Plan, eps: &Float) -> Result<(Enclosure, Plan)> {
    let mut best: Option<(Enclosure, Plan)> = None;
    let mut raise_n = false;
    for step in 0..=MAX_ESCALATIONS {
        let att = attempt(q, &plan)?;
        let w = att.value.width();
        if w <= *eps {
            return Ok((att.value, plan));
        }
        if best.as_ref().is_none_or(|(b, _)| w < b.width()) {
            best = Some((att.value.clone(), plan.clone()));
        }
        if step == MAX_ESCALATIONS || !escalate(q, &mut plan, &att, eps, &mut raise_n)? {
            return Err(Error::UnreachableTolerance {
                escalations: step,
                best: Box::new(best.expect("at least one attempt")),
            });
        }
    }
    unreachable!()
}

/// Certified enclosure of the query's target with width at most `q.eps`,
/// together with the plan that produced it.
pub fn enclose(q: &Query) -> Result<(Enclosure, Plan)> {
    let plan0 = plan(q)?;
    match q.target {
        Target::Gamma => enclose_gamma(q, plan0),
        _ => run(q, plan0, &q.eps),
    }
}

fn enclose_gamma(q: &Query, mut plan: Plan) -> Result<(Enclosure, Plan)> {
    let mut log_eps = plan.log_eps.clone().expect("gamma plans carry a log tolerance");
    let mut spent = 0;
    loop {
        let (lg, used) = match run(q, plan.clone(), &log_eps) {
            Ok(v) => v,
            Err(Error::UnreachableTolerance { escalations, best }) => {
                let (lg, p) = *best;
                return Err(Error::UnreachableTolerance {
                    escalations: spent + escalations,
                    best: Box::new((lg.exp(), p)),
                });
            }
            Err(e) => return Err(e),
        };
        let g = lg.exp();
        if g.width() <= q.eps {
            return Ok((g, used));
        }
        spent += 1;
        if spent > MAX_ESCALATIONS {
            return Err(Error::UnreachableTolerance {
                escalations: spent,
                best: Box::new((g, used)),
            });
        }
        log_eps /= 4u32;
        let mut q2 = q.clone();
        q2.target = Target::LogGamma;
        plan = plan_with_eps(&q2, &log_eps, Some(log_eps.clone()))?;
        plan.precision = plan.precision.max(used.precision);
    }
}
