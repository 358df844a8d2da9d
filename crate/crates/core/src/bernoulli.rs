//! Exact Bernoulli numbers and polynomials.
//!
//! Everything here is computed in exact rational arithmetic. Bernoulli
//! numbers come from the recurrence `Σ_{k=0}^{n} C(n+1, k) B_k = 0` and are
//! memoized in a process-wide cache guarded by a reader/writer lock, so
//! concurrent readers never block each other and extensions are serialized.
//!
//! The root `λ₀` of an even-index polynomial on `[0, 1/2]` is never
//! materialized as a float. [`validity`] decides which side of `λ₀` a
//! rational `λ` lies on by the exact sign of `B_M(λ)`, and [`lambda0`]
//! isolates the root by bisection on exact signs, so the bracket it returns
//! is a certificate.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, LazyLock, RwLock};

use rug::{Integer, Rational};

use crate::error::{Error, Result};

static NUMBERS: LazyLock<RwLock<Vec<Rational>>> =
    LazyLock::new(|| RwLock::new(vec![Rational::from(1)]));

static POLYS: LazyLock<RwLock<HashMap<u32, Arc<BernoulliPolynomial>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Exact Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli_number(n: u32) -> Rational {
    ensure_numbers(n);
    NUMBERS.read().unwrap()[n as usize].clone()
}

/// Runs `f` over the cached numbers `B_0..=B_n` without cloning them.
pub fn with_numbers<T>(n: u32, f: impl FnOnce(&[Rational]) -> T) -> T {
    ensure_numbers(n);
    let cache = NUMBERS.read().unwrap();
    f(&cache[..=n as usize])
}

fn ensure_numbers(n: u32) {
    let n = n as usize;
    if NUMBERS.read().unwrap().len() > n {
        return;
    }
    let mut cache = NUMBERS.write().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // B_m = -1/(m+1) Σ_{k<m} C(m+1, k) B_k
        let mut binom = Integer::from(1);
        let mut acc = Rational::new();
        for (k, b) in cache.iter().enumerate() {
            if *b != 0 {
                acc += Rational::from(&binom * b.numer()) / b.denom();
            }
            binom *= (m + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        acc /= (m + 1) as u32;
        acc = -acc;
        cache.push(acc);
    }
}

/// Number of Bernoulli numbers currently memoized.
pub fn cached_len() -> usize {
    NUMBERS.read().unwrap().len()
}

/// Writes the memoized numbers as `n: num/den` lines.
pub fn save_cache(path: &Path) -> Result<()> {
    let cache = NUMBERS.read().unwrap();
    let mut out = fs::File::create(path)?;
    for (n, b) in cache.iter().enumerate() {
        writeln!(out, "{n}: {}/{}", b.numer(), b.denom())?;
    }
    Ok(())
}

/// Loads a cache file written by [`save_cache`].
///
/// Entries are accepted only as a contiguous prefix `0, 1, 2, ...`, and every
/// loaded value is re-checked against the defining recurrence, so a corrupted
/// file can shorten the cache but never poison it.
pub fn load_cache(path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (idx, frac) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("cache line {}: missing ':'", line_no + 1)))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("cache line {}: {e}", line_no + 1)))?;
        if idx != values.len() {
            break;
        }
        let value = parse_rational(frac.trim())?;
        values.push(value);
    }
    let valid = recurrence_prefix(&values);
    values.truncate(valid);
    let mut cache = NUMBERS.write().unwrap();
    if values.len() > cache.len() {
        *cache = values;
    }
    Ok(cache.len())
}

/// Length of the longest prefix of `values` that satisfies the recurrence.
fn recurrence_prefix(values: &[Rational]) -> usize {
    if values.first().is_none_or(|b| *b != 1) {
        return 0;
    }
    for m in 1..values.len() {
        let mut binom = Integer::from(1);
        let mut acc = Rational::new();
        for (k, b) in values[..=m].iter().enumerate() {
            acc += Rational::from(&binom * b.numer()) / b.denom();
            binom *= (m + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        if acc != 0 {
            return m;
        }
    }
    values.len()
}

/// Parses `p/q`, an integer, or a terminating decimal such as `-0.125` or
/// `1e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational or decimal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: Integer = p.trim().parse().map_err(|_| bad())?;
        let q: Integer = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::from((p, q)));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: Integer = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let mut r = Rational::from(all);
    if scale >= 0 {
        r *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        r /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    if neg {
        r = -r;
    }
    Ok(r)
}

/// The degree-`n` Bernoulli polynomial with exact coefficients in ascending
/// powers of `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliPolynomial {
    coefficients: Vec<Rational>,
}

impl BernoulliPolynomial {
    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    /// Coefficients in ascending powers, length `degree + 1`.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Exact value at `lambda` by Horner's rule.
    pub fn eval(&self, lambda: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coefficients.iter().rev() {
            acc *= lambda;
            acc += c;
        }
        acc
    }

    /// Exact `∫₀¹ B_n(t) dt`, from the antiderivative of the coefficients.
    pub fn integral_unit(&self) -> Rational {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| Rational::from(c / (j as u32 + 1)))
            .sum()
    }

    /// Sum of the absolute values of the coefficients, an upper bound on
    /// `|B_n|` over `[0, 1]`.
    pub fn abs_coefficient_sum(&self) -> Rational {
        self.coefficients.iter().map(|c| Rational::from(c.abs_ref())).sum()
    }
}

impl fmt::Display for BernoulliPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coefficients.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let sign = if c.cmp0() == Ordering::Less { "-" } else { "+" };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = Rational::from(c.abs_ref());
            let show_coeff = mag != 1 || j == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match j {
                0 => {}
                1 => write!(f, "{}λ", if show_coeff { "·" } else { "" })?,
                _ => write!(f, "{}λ^{j}", if show_coeff { "·" } else { "" })?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exact Bernoulli polynomial `B_n(λ) = Σ_j C(n, j) B_{n-j} λ^j`, memoized.
pub fn bernoulli_poly(n: u32) -> Arc<BernoulliPolynomial> {
    if let Some(p) = POLYS.read().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let coefficients = with_numbers(n, |b| {
        let mut binom = Integer::from(1);
        let mut out = Vec::with_capacity(n as usize + 1);
        for j in 0..=n {
            out.push(Rational::from(&binom * b[(n - j) as usize].numer()) / b[(n - j) as usize].denom());
            binom *= n - j;
            binom /= j + 1;
        }
        out
    });
    let poly = Arc::new(BernoulliPolynomial { coefficients });
    POLYS
        .write()
        .unwrap()
        .entry(n)
        .or_insert_with(|| Arc::clone(&poly))
        .clone()
}

static VALUES: LazyLock<RwLock<HashMap<(u32, Rational), Rational>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Exact `B_n(λ)`, memoized per `(n, λ)`.
///
/// Evaluated in integers: with `λ = p/q` and `D` a common denominator of
/// `B_0..B_n`, `D q^n B_n(λ) = Σ_j C(n, j) (D B_{n−j}) p^j q^{n−j}`.
pub fn eval_poly(n: u32, lambda: &Rational) -> Rational {
    let key = (n, lambda.clone());
    if let Some(v) = VALUES.read().unwrap().get(&key) {
        return v.clone();
    }
    let value = with_numbers(n, |b| {
        let common = b
            .iter()
            .fold(Integer::from(1), |acc, r| acc.lcm(r.denom()));
        let (p, q) = (lambda.numer(), lambda.denom());
        let mut binom = Integer::from(1);
        let mut p_pow = Integer::from(1);
        let mut acc = Integer::new();
        for j in 0..=n {
            let bk = &b[(n - j) as usize];
            acc *= q;
            if *bk != 0 {
                let scaled = Integer::from(&common / bk.denom()) * bk.numer();
                acc += scaled * &binom * &p_pow;
            }
            p_pow *= p;
            binom *= n - j;
            binom /= j + 1;
        }
        let denom = common * q.pow_ref_u(n);
        Rational::from((acc, denom))
    });
    VALUES.write().unwrap().insert(key, value.clone());
    value
}

trait PowU {
    fn pow_ref_u(&self, k: u32) -> Integer;
}

impl PowU for Integer {
    fn pow_ref_u(&self, k: u32) -> Integer {
        use rug::ops::Pow;
        Integer::from(self.pow(k))
    }
}

/// A rational interval `[lo, hi] ⊂ [0, 1/2]` whose endpoints carry opposite
/// exact signs of `B_M`, so it contains the root `λ₀`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBracket {
    pub index: u32,
    pub lo: Rational,
    pub hi: Rational,
}

impl RootBracket {
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }
}

/// Default bracket width, `2⁻⁶⁴`.
pub fn default_root_tolerance() -> Rational {
    Rational::from((1, Integer::from(Integer::u_pow_u(2, 64))))
}

/// Isolates the root of `B_M` on `[0, 1/2]` to width at most `tol`.
///
/// `index` must be even and at least 2. Callers pass `M = N` for even `N`
/// and `M = N + 1` for odd `N`.
pub fn lambda0(index: u32, tol: &Rational) -> Result<RootBracket> {
    if index < 2 || index % 2 != 0 {
        return Err(Error::Domain(format!(
            "λ₀ is defined for even indices M ≥ 2, got {index}"
        )));
    }
    if tol.cmp0() != Ordering::Greater {
        return Err(Error::Domain("bracket tolerance must be positive".into()));
    }
    let poly = bernoulli_poly(index);
    let mut lo = Rational::new();
    let mut hi = Rational::from((1, 2));
    let s_lo = poly.eval(&lo).cmp0();
    let s_hi = poly.eval(&hi).cmp0();
    if s_lo == s_hi || s_lo == Ordering::Equal || s_hi == Ordering::Equal {
        return Err(Error::Inconsistent(format!(
            "B_{index} has no sign change on [0, 1/2]"
        )));
    }
    while Rational::from(&hi - &lo) > *tol {
        let mid = Rational::from(&lo + &hi) / 2u32;
        match poly.eval(&mid).cmp0() {
            Ordering::Equal => {
                // Exact dyadic root: shrink symmetrically around it.
                let quarter = Rational::from(tol / 4u32);
                lo = Rational::from(&mid - &quarter);
                hi = mid + quarter;
                break;
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(RootBracket { index, lo, hi })
}

/// Which side of a truncation `ψ` lies on, per the validity table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BoundDirection {
    LowerBound,
    UpperBound,
    Invalid,
}

impl BoundDirection {
    pub fn flipped(self) -> Self {
        match self {
            Self::LowerBound => Self::UpperBound,
            Self::UpperBound => Self::LowerBound,
            Self::Invalid => Self::Invalid,
        }
    }

    pub fn is_valid(self) -> bool {
        self != Self::Invalid
    }
}

impl fmt::Display for BoundDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LowerBound => "lower",
            Self::UpperBound => "upper",
            Self::Invalid => "invalid",
        })
    }
}

/// Position of `λ` relative to the root `λ₀` of the relevant even-index
/// polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSide {
    Below,
    At,
    Above,
}

/// Decides `λ` vs `λ₀(B_M)` from exact signs, using that `B_M` is monotone
/// on `[0, 1/2]` with `B_M(0) ≠ 0`.
pub fn root_side(index: u32, lambda: &Rational) -> RootSide {
    let at_zero = bernoulli_number(index).cmp0();
    match eval_poly(index, lambda).cmp0() {
        Ordering::Equal => RootSide::At,
        s if s == at_zero => RootSide::Below,
        _ => RootSide::Above,
    }
}

fn check_truncation_domain(n: u32, lambda: &Rational) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("truncation order N must be at least 1".into()));
    }
    if lambda.cmp0() == Ordering::Less || *lambda > Rational::from((1, 2)) {
        return Err(Error::Domain(format!(
            "λ = {lambda} lies outside [0, 1/2]"
        )));
    }
    Ok(())
}

/// Direction in which `F_N(λ; ·)` bounds `ψ` on `(λ, ∞)`, or `Invalid` when
/// the `(N, λ)` hypothesis fails.
///
/// | `N mod 4` | condition | direction |
/// |-----------|-----------|-----------|
/// | 1 | `λ ≥ λ₀(B_{N+1})` | lower |
/// | 3 | `λ ≥ λ₀(B_{N+1})` | upper |
/// | 2 | `λ ≤ λ₀(B_N)` | lower |
/// | 0 | `λ ≤ λ₀(B_N)` | upper |
pub fn validity(n: u32, lambda: &Rational) -> Result<BoundDirection> {
    check_truncation_domain(n, lambda)?;
    let index = if n % 2 == 0 { n } else { n + 1 };
    let side = root_side(index, lambda);
    let ok = match n % 2 {
        1 => side != RootSide::Below,
        _ => side != RootSide::Above,
    };
    Ok(match (ok, n % 4) {
        (false, _) => BoundDirection::Invalid,
        (true, 1 | 2) => BoundDirection::LowerBound,
        (true, _) => BoundDirection::UpperBound,
    })
}

/// Human-readable reason an `(N, λ)` pair is invalid, or `None` if valid.
pub fn invalidity_reason(n: u32, lambda: &Rational) -> Result<Option<String>> {
    if validity(n, lambda)?.is_valid() {
        return Ok(None);
    }
    Ok(Some(if n % 2 == 0 {
        format!("λ exceeds λ₀, the root of B_{n} in [0, 1/2]; even N needs λ ≤ λ₀")
    } else {
        format!(
            "λ is below λ₀, the root of B_{} in [0, 1/2]; odd N needs λ ≥ λ₀",
            n + 1
        )
    }))
}
