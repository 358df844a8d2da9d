//! Closed intervals of MPFR floats with outward rounding.
//!
//! Every operation rounds the lower endpoint toward −∞ and the upper toward
//! +∞, so if the inputs contain their mathematical values the output contains
//! the result. The underlying transcendental primitives are correctly
//! rounded in each direction.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{LazyLock, RwLock};
use std::collections::HashMap;

use rug::float::{Constant, Round};
use rug::ops::{NegAssign, Pow};
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Configurable-precision binary float; every primitive can be requested
/// rounded down or up.
pub type Scalar = Float;

/// Working precision in bits.
pub type Precision = u32;

/// A certified interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    lo: Float,
    hi: Float,
}

/// `r` rounded in direction `round` at `prec` bits.
pub fn round_rational(prec: Precision, r: &Rational, round: Round) -> Float {
    Float::with_val_round(prec, r, round).0
}

fn min_f(a: Float, b: Float) -> Float {
    if a <= b { a } else { b }
}

fn max_f(a: Float, b: Float) -> Float {
    if a >= b { a } else { b }
}

impl Enclosure {
    /// Builds `[lo, hi]`; rejects NaN and reversed endpoints.
    pub fn new(lo: Float, hi: Float) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Inconsistent(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(value: Float) -> Self {
        Self { lo: value.clone(), hi: value }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::point(Float::new(prec))
    }

    /// Tightest outward enclosure of an exact rational.
    pub fn from_rational(r: &Rational, prec: Precision) -> Self {
        Self {
            lo: round_rational(prec, r, Round::Down),
            hi: round_rational(prec, r, Round::Up),
        }
    }

    pub fn from_integer(n: &Integer, prec: Precision) -> Self {
        Self {
            lo: Float::with_val_round(prec, n, Round::Down).0,
            hi: Float::with_val_round(prec, n, Round::Up).0,
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn into_bounds(self) -> (Float, Float) {
        (self.lo, self.hi)
    }

    pub fn prec(&self) -> Precision {
        self.lo.prec().max(self.hi.prec())
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up).0
    }

    /// Midpoint, round-to-nearest. Not a certified quantity.
    pub fn mid(&self) -> Float {
        let mut m = Float::with_val(self.prec() + 1, &self.lo + &self.hi);
        m /= 2;
        m
    }

    /// Largest absolute value of a point in the interval, rounded up.
    pub fn mag(&self) -> Float {
        max_f(Float::with_val(self.prec(), self.lo.abs_ref()), Float::with_val(self.prec(), self.hi.abs_ref()))
    }

    pub fn contains(&self, x: &Float) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        // Float/Rational comparisons are exact.
        self.lo <= *r && self.hi >= *r
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Sign of every point of the interval, or `None` if it contains 0.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.cmp0() == Some(Ordering::Greater) {
            Some(Ordering::Greater)
        } else if self.hi.cmp0() == Some(Ordering::Less) {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Some(Ordering::Greater)
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: min_f(self.lo.clone(), other.lo.clone()),
            hi: max_f(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn neg(&self) -> Enclosure {
        let mut lo = self.hi.clone();
        let mut hi = self.lo.clone();
        lo.neg_assign();
        hi.neg_assign();
        Enclosure { lo, hi }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec().max(other.prec());
        Enclosure {
            lo: Float::with_val_round(p, &self.lo + &other.lo, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi + &other.hi, Round::Up).0,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec().max(other.prec());
        Enclosure {
            lo: Float::with_val_round(p, &self.lo - &other.hi, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi - &other.lo, Round::Up).0,
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let p = self.prec().max(other.prec());
        let prod = |a: &Float, b: &Float, r: Round| Float::with_val_round(p, a * b, r).0;
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        // Fast path for the common all-nonnegative case.
        if a.cmp0() != Some(Ordering::Less) && c.cmp0() != Some(Ordering::Less) {
            return Enclosure { lo: prod(a, c, Round::Down), hi: prod(b, d, Round::Up) };
        }
        let lo = [(a, c), (a, d), (b, c), (b, d)]
            .into_iter()
            .map(|(x, y)| prod(x, y, Round::Down))
            .reduce(min_f)
            .unwrap();
        let hi = [(a, c), (a, d), (b, c), (b, d)]
            .into_iter()
            .map(|(x, y)| prod(x, y, Round::Up))
            .reduce(max_f)
            .unwrap();
        Enclosure { lo, hi }
    }

    /// Multiplies by an exact rational, rounding outward.
    pub fn mul_rational(&self, r: &Rational) -> Enclosure {
        self.mul(&Enclosure::from_rational(r, self.prec()))
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if self.sign().is_none_or(|s| s == Ordering::Equal) {
            return Err(Error::Domain("reciprocal of an interval containing 0".into()));
        }
        let p = self.prec();
        Ok(Enclosure {
            lo: Float::with_val_round(p, 1 / &self.hi, Round::Down).0,
            hi: Float::with_val_round(p, 1 / &self.lo, Round::Up).0,
        })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self.mul(&other.recip()?))
    }

    /// Natural logarithm; requires a strictly positive interval.
    pub fn ln(&self) -> Result<Enclosure> {
        if !self.is_positive() {
            return Err(Error::Domain(format!("log of non-positive interval [{}, {}]", self.lo, self.hi)));
        }
        let p = self.prec();
        Ok(Enclosure {
            lo: Float::with_val_round(p, self.lo.ln_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.ln_ref(), Round::Up).0,
        })
    }

    pub fn exp(&self) -> Enclosure {
        let p = self.prec();
        Enclosure {
            lo: Float::with_val_round(p, self.lo.exp_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.exp_ref(), Round::Up).0,
        }
    }

    /// Integer power of a nonnegative interval.
    pub fn pow_u(&self, k: u32) -> Result<Enclosure> {
        if self.lo.cmp0() == Some(Ordering::Less) {
            return Err(Error::Domain("pow_u expects a nonnegative interval".into()));
        }
        let p = self.prec();
        Ok(Enclosure {
            lo: Float::with_val_round(p, (&self.lo).pow(k), Round::Down).0,
            hi: Float::with_val_round(p, (&self.hi).pow(k), Round::Up).0,
        })
    }

    /// Rounds endpoints outward to `prec` bits.
    pub fn with_prec(&self, prec: Precision) -> Enclosure {
        Enclosure {
            lo: Float::with_val_round(prec, &self.lo, Round::Down).0,
            hi: Float::with_val_round(prec, &self.hi, Round::Up).0,
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        write!(
            f,
            "[{}, {}]",
            self.lo.to_string_radix_round(10, Some(digits), Round::Down),
            self.hi.to_string_radix_round(10, Some(digits), Round::Up)
        )
    }
}

static LOG_SQRT_2PI: LazyLock<RwLock<HashMap<Precision, Enclosure>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Enclosure of `π`.
pub fn pi(prec: Precision) -> Enclosure {
    Enclosure {
        lo: Float::with_val_round(prec, Constant::Pi, Round::Down).0,
        hi: Float::with_val_round(prec, Constant::Pi, Round::Up).0,
    }
}

/// Enclosure of `log √(2π)`, cached per precision.
pub fn log_sqrt_2pi(prec: Precision) -> Enclosure {
    if let Some(e) = LOG_SQRT_2PI.read().unwrap().get(&prec) {
        return e.clone();
    }
    // Scaling by 2 and 1/2 is exact in binary.
    let two_pi = pi(prec + 8).mul_rational(&Rational::from(2));
    let e = two_pi
        .ln()
        .expect("2π is positive")
        .mul_rational(&Rational::from((1, 2)))
        .with_prec(prec);
    LOG_SQRT_2PI.write().unwrap().insert(prec, e.clone());
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_enclosure_is_tight_and_outward() {
        let third = Rational::from((1, 3));
        let e = Enclosure::from_rational(&third, 64);
        assert!(e.contains_rational(&third));
        assert!(e.lo() < e.hi());
        let exact = Enclosure::from_rational(&Rational::from((3, 8)), 64);
        assert_eq!(exact.width(), 0);
    }

    #[test]
    fn mul_handles_mixed_signs() {
        let a = Enclosure::new(Float::with_val(53, -2), Float::with_val(53, 3)).unwrap();
        let b = Enclosure::new(Float::with_val(53, -5), Float::with_val(53, 1)).unwrap();
        let p = a.mul(&b);
        assert_eq!(*p.lo(), -15);
        assert_eq!(*p.hi(), 10);
    }

    #[test]
    fn ln_and_exp_bracket_known_values() {
        let one = Enclosure::from_rational(&Rational::from(1), 128);
        assert_eq!(one.ln().unwrap().width(), 0);
        let e = one.exp();
        let reference = Float::with_val(300, 1).exp();
        assert!(e.lo() <= &reference && &reference <= e.hi());
        assert!(Enclosure::zero(64).ln().is_err());
    }

    #[test]
    fn recip_rejects_zero_straddle() {
        let a = Enclosure::new(Float::with_val(53, -1), Float::with_val(53, 1)).unwrap();
        assert!(a.recip().is_err());
    }

    #[test]
    fn log_sqrt_2pi_reference() {
        // 0.91893853320467274178032973640561763986139747363778341281715...
        let reference = Float::with_val(
            400,
            Float::parse("0.91893853320467274178032973640561763986139747363778").unwrap(),
        );
        let e = log_sqrt_2pi(256);
        assert!(e.width() < Float::with_val(64, 1e-75));
        let d = Float::with_val(400, e.mid() - &reference).abs();
        assert!(d < 1e-49);
    }
}
