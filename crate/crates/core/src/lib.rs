//! Certified two-sided enclosures of `ψ^{(m)}(x)`, `log Γ(x)` and `Γ(x)` for
//! real `x > 0`.
//!
//! Values are bracketed between two truncations of the asymptotic expansion
//! of `log Γ` in inverse powers of `x − λ`, whose coefficients are Bernoulli
//! polynomial values `B_n(λ)`. For admissible `(N, λ)` each truncation is a
//! one-sided bound, so a lower and an upper truncation evaluated in outward
//! rounded arithmetic give a certificate. The functional equation
//! `ψ(x + 1) = ψ(x) + 1/x` moves the evaluation point far enough out that the
//! bracket meets any requested tolerance.
//!
//! ```
//! use gammabound::{enclose, Query, Target, Rational};
//!
//! let q = Query::new(Target::Psi(0), Rational::from(1), 1e-20);
//! let (value, plan) = enclose(&q).unwrap();
//! println!("ψ(1) ∈ {value}  (K = {})", plan.k);
//! ```

pub mod bernoulli;
pub mod enclosure;
pub mod engine;
pub mod error;
pub mod expansions;
pub mod verify;

pub use bernoulli::{
    bernoulli_number, bernoulli_poly, eval_poly, lambda0, validity, BernoulliPolynomial,
    BoundDirection, RootBracket,
};
pub use enclosure::{Enclosure, Precision, Scalar};
pub use engine::{enclose, plan, Plan, Query, Target};
pub use error::{Error, Result};
pub use expansions::{Family, TruncationSpec};
pub use rug::{Float, Integer, Rational};
