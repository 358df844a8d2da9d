//! Enclosures of the truncated asymptotic expansions
//!
//! ```text
//! F_N(λ; x) = log(x−λ) − Σ_{n=1}^{N} (−1)^n B_n(λ)/n · (x−λ)^{−n}
//! L_N(λ; x) = log √(2π) + (x − ½) log(x−λ) − (x−λ)
//!             + Σ_{n=2}^{N} (−1)^n B_n(λ)/(n(n−1)) · (x−λ)^{1−n}
//! ```
//!
//! and of their derivatives. Bernoulli coefficients enter exactly and are
//! rounded outward once per `(λ, kind, precision)`; the power series in
//! `u = 1/(x−λ)` is summed by Horner's rule from the highest power down.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::bernoulli::{eval_poly, BoundDirection};
use crate::enclosure::{log_sqrt_2pi, round_rational, Enclosure, Precision};
use crate::error::{Error, Result};

/// The pair `(λ, N)` naming one truncation `F_N(λ; ·)` / `L_N(λ; ·)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncationSpec {
    lambda: Rational,
    n: u32,
}

impl TruncationSpec {
    pub fn new(lambda: Rational, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("truncation order N must be at least 1".into()));
        }
        if lambda.cmp0() == Ordering::Less || lambda > Rational::from((1, 2)) {
            return Err(Error::Domain(format!("λ = {lambda} lies outside [0, 1/2]")));
        }
        Ok(Self { lambda, n })
    }

    /// Shorthand for `λ = num/den`; panics on an invalid spec.
    pub fn of(num: i64, den: i64, n: u32) -> Self {
        Self::new(Rational::from((num, den)), n).expect("valid truncation spec")
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn with_n(&self, n: u32) -> Result<Self> {
        Self::new(self.lambda.clone(), n)
    }

    /// `ψ`-direction of this truncation.
    pub fn validity(&self) -> BoundDirection {
        crate::bernoulli::validity(self.n, &self.lambda).expect("spec invariants checked at construction")
    }

    /// `x − λ`, or a domain error unless it is strictly positive.
    pub fn offset(&self, x: &Rational) -> Result<Rational> {
        let y = Rational::from(x - &self.lambda);
        if y.cmp0() != Ordering::Greater {
            return Err(Error::Domain(format!(
                "x = {x} must exceed λ = {}",
                self.lambda
            )));
        }
        Ok(y)
    }
}

/// Which expansion a term-size estimate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `F_N`, the `ψ` expansion.
    Psi,
    /// `L_N`, the `log Γ` expansion.
    LogGamma,
}

/// Exact coefficient of `u^n` in `F_N(λ; x) − log(x−λ)`, i.e.
/// `−(−1)^n B_n(λ)/n`.
pub fn psi_coefficient(lambda: &Rational, n: u32) -> Rational {
    let b = eval_poly(n, lambda) / n;
    if n % 2 == 0 { -b } else { b }
}

/// Exact coefficient of `u^{n−1}` in the `L_N` sum,
/// `(−1)^n B_n(λ)/(n(n−1))`, for `n ≥ 2`.
pub fn log_gamma_coefficient(lambda: &Rational, n: u32) -> Rational {
    debug_assert!(n >= 2);
    let b = eval_poly(n, lambda) / (n * (n - 1));
    if n % 2 == 0 { b } else { -b }
}

/// Rising factorial `(a)_k = a(a+1)⋯(a+k−1)`.
pub fn rising_factorial(a: u32, k: u32) -> Integer {
    (0..k).fold(Integer::from(1), |acc, i| acc * (a + i))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum CoeffKind {
    Psi,
    /// `m`-th derivative of the `L_N` sum.
    LogGamma(u32),
}

type CoeffKey = (Rational, CoeffKind, Precision);

static COEFFS: LazyLock<RwLock<HashMap<CoeffKey, Arc<Vec<Enclosure>>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn exact_coefficient(lambda: &Rational, kind: &CoeffKind, n: u32) -> Rational {
    match *kind {
        CoeffKind::Psi if n >= 1 => psi_coefficient(lambda, n),
        CoeffKind::LogGamma(m) if n >= 2 => {
            log_gamma_coefficient(lambda, n) * rising_factorial(n - 1, m)
        }
        _ => Rational::new(),
    }
}

/// Enclosures of coefficients `0..=upto`, extended and cached on demand.
fn coefficients(lambda: &Rational, kind: CoeffKind, upto: u32, prec: Precision) -> Arc<Vec<Enclosure>> {
    let key = (lambda.clone(), kind, prec);
    if let Some(v) = COEFFS.read().unwrap().get(&key) {
        if v.len() > upto as usize {
            return Arc::clone(v);
        }
    }
    let mut cache = COEFFS.write().unwrap();
    let existing = cache.get(&key).cloned().unwrap_or_default();
    if existing.len() > upto as usize {
        return existing;
    }
    let mut v: Vec<Enclosure> = (*existing).clone();
    for n in v.len() as u32..=upto {
        v.push(Enclosure::from_rational(&exact_coefficient(lambda, &key.1, n), prec));
    }
    let v = Arc::new(v);
    cache.insert(key, Arc::clone(&v));
    v
}

/// `Σ_{n=first}^{last} c_n u^{n−first}` by Horner's rule.
fn horner(c: &[Enclosure], first: u32, last: u32, u: &Enclosure) -> Enclosure {
    let mut acc = c[last as usize].clone();
    for n in (first..last).rev() {
        acc = c[n as usize].add(&acc.mul(u));
    }
    acc
}

struct Arg {
    y: Rational,
    u: Enclosure,
    log_y: Enclosure,
}

fn arg(spec: &TruncationSpec, x: &Rational, prec: Precision) -> Result<Arg> {
    let y = spec.offset(x)?;
    let u = Enclosure::from_rational(&Rational::from(y.recip_ref()), prec);
    let log_y = Enclosure::from_rational(&y, prec).ln()?;
    Ok(Arg { y, u, log_y })
}

/// Enclosure of `F_N(λ; x)`.
pub fn eval_f(spec: &TruncationSpec, x: &Rational, prec: Precision) -> Result<Enclosure> {
    let Arg { u, log_y, .. } = arg(spec, x, prec)?;
    let c = coefficients(&spec.lambda, CoeffKind::Psi, spec.n, prec);
    let series = u.mul(&horner(&c, 1, spec.n, &u));
    Ok(log_y.add(&series))
}

/// Enclosure of `L_N(λ; x)`. `N = 1` gives the sum-free Stirling core.
pub fn eval_l(spec: &TruncationSpec, x: &Rational, prec: Precision) -> Result<Enclosure> {
    let Arg { y, u, log_y } = arg(spec, x, prec)?;
    let half = Rational::from((1, 2));
    let lead = Enclosure::from_rational(&Rational::from(x - &half), prec).mul(&log_y);
    let mut total = log_sqrt_2pi(prec)
        .add(&lead)
        .sub(&Enclosure::from_rational(&y, prec));
    if spec.n >= 2 {
        let c = coefficients(&spec.lambda, CoeffKind::LogGamma(0), spec.n, prec);
        total = total.add(&u.mul(&horner(&c, 2, spec.n, &u)));
    }
    Ok(total)
}

/// Enclosure of `d^m/dx^m L_N(λ; x)` from the closed-form termwise
/// derivative. `m = 0` is [`eval_l`]; `m = 1` reproduces `F_N` through this
/// separate code path.
pub fn eval_l_derivative(spec: &TruncationSpec, m: u32, x: &Rational, prec: Precision) -> Result<Enclosure> {
    if m == 0 {
        return eval_l(spec, x, prec);
    }
    let Arg { y, u, log_y } = arg(spec, x, prec)?;
    let half = Rational::from((1, 2));
    let x_half = Rational::from(x - &half);
    // d^m [(x − ½) log y − y]
    let core = if m == 1 {
        log_y.add(&Enclosure::from_rational(&(Rational::from(&x_half / &y) - 1u32), prec))
    } else {
        let fact = |k: u32| Integer::from(Integer::factorial(k));
        let y_inv = Rational::from(y.recip_ref());
        let mut a = x_half * fact(m - 1) * y_inv.pow_ref_rational(m);
        if m % 2 == 0 {
            a = -a;
        }
        let mut b = Rational::from(fact(m - 2) * m) * y_inv.pow_ref_rational(m - 1);
        if m % 2 == 1 {
            b = -b;
        }
        Enclosure::from_rational(&(a + b), prec)
    };
    if spec.n < 2 {
        return Ok(core);
    }
    let c = coefficients(&spec.lambda, CoeffKind::LogGamma(m), spec.n, prec);
    let u_pow = Enclosure::from_rational(&Rational::from(y.recip_ref()).pow_ref_rational(m + 1), prec);
    let mut series = u_pow.mul(&horner(&c, 2, spec.n, &u));
    if m % 2 == 1 {
        series = series.neg();
    }
    Ok(core.add(&series))
}

/// Enclosure of the Sonin approximant
/// `Γ_N(x) = √(2π) (x−½)^{x−½} e^{−(x−½)} exp Σ_{n=1}^{N} B_{2n}(½)/(2n(2n−1)) (x−½)^{1−2n}`,
/// computed as `exp L_{2N}(½; x)`.
pub fn eval_gamma_n(n: u32, x: &Rational, prec: Precision) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::Domain("Γ_N needs N ≥ 1".into()));
    }
    let spec = TruncationSpec::of(1, 2, 2 * n);
    Ok(eval_l(&spec, x, prec)?.exp())
}

/// Upper bound on the magnitude of the first term left out of the
/// truncation: `|B_{N+1}(λ)|/(N+1) · (x−λ)^{−(N+1)}` for `F_N` and
/// `|B_{N+1}(λ)|/((N+1)N) · (x−λ)^{−N}` for `L_N`.
///
/// Zero when `B_{N+1}(λ) = 0`. This is a planning quantity; certified error
/// bounds come from bracketing with two valid truncations.
pub fn first_omitted_term(spec: &TruncationSpec, x: &Rational, family: Family) -> Result<Float> {
    Ok(round_rational(128, &first_omitted_term_exact(spec, x, family)?, Round::Up))
}

/// Exact rational value of [`first_omitted_term`].
pub fn first_omitted_term_exact(spec: &TruncationSpec, x: &Rational, family: Family) -> Result<Rational> {
    let y = spec.offset(x)?;
    let n = spec.n;
    let b = Rational::from(eval_poly(n + 1, &spec.lambda).abs_ref());
    let y_inv = Rational::from(y.recip_ref());
    Ok(match family {
        Family::Psi => b / (n + 1) * y_inv.pow_ref_rational(n + 1),
        Family::LogGamma => b / ((n + 1) * n) * y_inv.pow_ref_rational(n),
    })
}

/// First nonzero omitted term, looking past vanishing Bernoulli values, with
/// the index it was found at. `None` if none exists within `max_look` terms.
pub fn next_nonzero_term(spec: &TruncationSpec, x: &Rational, family: Family, max_look: u32) -> Result<Option<(u32, Rational)>> {
    for k in 0..max_look {
        let s = spec.with_n(spec.n + k)?;
        let t = first_omitted_term_exact(&s, x, family)?;
        if t != 0 {
            return Ok(Some((spec.n + k + 1, t)));
        }
    }
    Ok(None)
}

trait PowRational {
    fn pow_ref_rational(&self, k: u32) -> Rational;
}

impl PowRational for Rational {
    fn pow_ref_rational(&self, k: u32) -> Rational {
        Rational::from(self.pow(k))
    }
}
