//! Shared fixtures for the criterion benches.

use gammabound::{Float, Query, Rational, Target};

/// ψ(1) to twenty places with the default planner.
pub fn psi_one() -> Query {
    Query::new(Target::Psi(0), Rational::from(1), 1e-20)
}

/// ψ(1) to 10⁻²⁷⁰ from a fixed shift of 99 and the given truncation order.
pub fn psi_one_deep(n: u32) -> Query {
    let eps = Float::with_val(64, Float::parse("1e-270").expect("literal"));
    Query::with_eps(Target::Psi(0), Rational::from(1), eps)
        .lambda(Rational::from((1, 2)))
        .n(n)
        .k(99)
        .precision(1024)
}

/// A spread of targets and arguments at a moderate tolerance.
pub fn mixed(eps: f64) -> Vec<(String, Query)> {
    let mut out = Vec::new();
    for (name, target) in [
        ("psi", Target::Psi(0)),
        ("trigamma", Target::Psi(1)),
        ("lgamma", Target::LogGamma),
        ("gamma", Target::Gamma),
    ] {
        for x in ["1/10", "1", "10", "1000"] {
            let xr: Rational = x.parse().expect("literal");
            out.push((format!("{name}({x})"), Query::new(target, xr, eps)));
        }
    }
    out
}
