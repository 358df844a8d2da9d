//! Outward-rounded fixed-point printing, so a printed bracket still contains
//! the enclosure it came from.

use gammabound::{Enclosure, Float, Integer, Rational};
use rug::ops::Pow;

fn scale(places: u32) -> Integer {
    Integer::from(10u32).pow(places)
}

/// `r` with `places` digits after the point, rounded up or down.
pub fn fixed_rational(r: &Rational, places: u32, up: bool) -> String {
    let scaled = Rational::from(r * scale(places));
    let n = if up { scaled.ceil() } else { scaled.floor() };
    let n = n.numer().clone();
    let neg = n < 0;
    let mut digits = n.abs().to_string();
    if places > 0 {
        while digits.len() <= places as usize {
            digits.insert(0, '0');
        }
        digits.insert(digits.len() - places as usize, '.');
    }
    if neg {
        digits.insert(0, '-');
    }
    digits
}

pub fn fixed(v: &Float, places: u32, up: bool) -> String {
    let r = v.to_rational().expect("finite enclosure endpoint");
    fixed_rational(&r, places, up)
}

/// Smallest number of places with `10^{−places} ≤ eps`.
pub fn places_for(eps: &Rational) -> u32 {
    let mut p = 0;
    let mut unit = Rational::from(1);
    while unit > *eps && p < 10_000 {
        unit /= 10u32;
        p += 1;
    }
    p
}

/// Printed lower and upper end of `e`, using the fewest places `≥ min_places`
/// for which the printed width is at most `eps`. Falls back to
/// `min_places + 80` places when no such count exists.
pub fn bracket(e: &Enclosure, min_places: u32, eps: &Rational) -> (String, String) {
    let lo = e.lo().to_rational().expect("finite lower end");
    let hi = e.hi().to_rational().expect("finite upper end");
    let last = min_places + 80;
    for p in min_places..=last {
        let l = fixed_rational(&lo, p, false);
        let h = fixed_rational(&hi, p, true);
        let width = parse(&h) - parse(&l);
        if width <= *eps || p == last {
            return (l, h);
        }
    }
    unreachable!()
}

pub fn parse(s: &str) -> Rational {
    gammabound::bernoulli::parse_rational(s).expect("printed decimal")
}
