use std::cmp::Ordering;

use gammabound::bernoulli::{default_root_tolerance, root_side, with_numbers, RootSide};
use gammabound::engine::{bound_derivative_side, bound_psi_side, derivative_direction};
use gammabound::expansions::{eval_f, eval_l, eval_l_derivative};
use gammabound::{
    bernoulli_number, bernoulli_poly, enclose, eval_poly, lambda0, plan, validity, BoundDirection, Enclosure,
    Float, Integer, Query, Rational, Target, TruncationSpec,
};
use proptest::prelude::*;

fn binom(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

fn pow2(e: u32) -> Rational {
    Rational::from(Integer::from(1) << e)
}

/// λ = k/den with 0 ≤ λ ≤ 1/2.
fn lambda_strategy() -> impl Strategy<Value = Rational> {
    (1i64..=64).prop_flat_map(|den| (0..=den / 2).prop_map(move |k| Rational::from((k, den))))
}

/// Rationals in [1, 1000] with small denominators.
fn x_strategy() -> impl Strategy<Value = Rational> {
    (1i64..=40).prop_flat_map(|den| (den..=1000 * den).prop_map(move |k| Rational::from((k, den))))
}

fn any_rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=60).prop_map(|(p, q)| Rational::from((p, q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernoulli_recurrence(n in 1u32..=60) {
        let sum = with_numbers(n, |b| {
            (0..=n).fold(Rational::new(), |acc, k| acc + Rational::from(&b[k as usize] * binom(n + 1, k)))
        });
        prop_assert_eq!(sum, 0);
    }

    #[test]
    fn odd_bernoulli_numbers_vanish(m in 1u32..=30) {
        prop_assert_eq!(bernoulli_number(2 * m + 1), 0);
    }

    #[test]
    fn value_at_half(n in 0u32..=60) {
        // 1 − 2^{1−n}
        let factor = if n == 0 { Rational::from(-1) } else { 1u32 - Rational::from(2u32) / pow2(n) };
        prop_assert_eq!(eval_poly(n, &Rational::from((1, 2))), -(factor * bernoulli_number(n)));
    }

    #[test]
    fn value_at_quarter(m in 1u32..=50) {
        let half = eval_poly(2 * m, &Rational::from((1, 2)));
        prop_assert_eq!(eval_poly(2 * m, &Rational::from((1, 4))), half / pow2(2 * m));
    }

    #[test]
    fn reflection(n in 0u32..=40, l in any_rational()) {
        let reflected = eval_poly(n, &Rational::from(1u32 - &l));
        let v = eval_poly(n, &l);
        prop_assert_eq!(reflected, if n % 2 == 0 { v } else { -v });
    }

    #[test]
    fn polynomial_shape(n in 0u32..=40) {
        let p = bernoulli_poly(n);
        prop_assert_eq!(p.degree(), n);
        prop_assert_eq!(p.coefficients().len() as u32, n + 1);
        prop_assert_eq!(p.coefficients()[n as usize].clone(), 1);
        prop_assert_eq!(p.coefficients()[0].clone(), bernoulli_number(n));
        prop_assert_eq!(p.integral_unit(), if n == 0 { 1 } else { 0 });
        if n >= 2 {
            prop_assert_eq!(p.eval(&Rational::new()), p.eval(&Rational::from(1)));
        }
    }

    #[test]
    fn eval_poly_matches_coefficients(n in 0u32..=30, l in any_rational()) {
        prop_assert_eq!(eval_poly(n, &l), bernoulli_poly(n).eval(&l));
    }

    #[test]
    fn validity_is_locally_constant(n in 1u32..=24, a in lambda_strategy(), b in lambda_strategy()) {
        let index = if n % 2 == 0 { n } else { n + 1 };
        let (sa, sb) = (root_side(index, &a), root_side(index, &b));
        if sa == sb && sa != RootSide::At {
            prop_assert_eq!(validity(n, &a).unwrap(), validity(n, &b).unwrap());
        }
    }

    #[test]
    fn validity_matches_root_bracket(n in 1u32..=24, l in lambda_strategy()) {
        let index = if n % 2 == 0 { n } else { n + 1 };
        let r = lambda0(index, &Rational::from((1, 1 << 20))).unwrap();
        let v = validity(n, &l).unwrap();
        if l < r.lo {
            prop_assert_eq!(v.is_valid(), n % 2 == 0);
        } else if l > r.hi {
            prop_assert_eq!(v.is_valid(), n % 2 == 1);
        }
    }
}

#[test]
fn root_brackets_below_quarter() {
    let tol = default_root_tolerance();
    for m in (2..=40).step_by(2) {
        assert_eq!(root_side(m, &Rational::from((1, 4))), RootSide::Above, "M = {m}");
        let r = lambda0(m, &tol).unwrap();
        assert!(r.lo.cmp0() != Ordering::Less && r.lo < r.hi && r.hi < Rational::from((1, 4)), "M = {m}");
        assert_ne!(eval_poly(m, &r.lo).cmp0(), eval_poly(m, &r.hi).cmp0());
        assert!(r.width() <= tol);
    }
}

fn spec_strategy(max_n: u32) -> impl Strategy<Value = TruncationSpec> {
    (lambda_strategy(), 1..=max_n).prop_map(|(l, n)| TruncationSpec::new(l, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn containment_monotonicity(spec in spec_strategy(14), x in x_strategy(), p in 53u32..=300) {
        for f in [eval_f, eval_l] {
            let coarse = f(&spec, &x, p).unwrap();
            let fine = f(&spec, &x, 2 * p).unwrap();
            prop_assert!(coarse.contains_enclosure(&fine), "{} vs {}", coarse, fine);
        }
    }

    #[test]
    fn width_shrinks_with_precision(spec in spec_strategy(14), x in x_strategy(), p in 64u32..=256) {
        let w = eval_f(&spec, &x, p).unwrap().width();
        let w2 = eval_f(&spec, &x, p + 64).unwrap().width();
        prop_assert!(w2 <= w / 2u32 || w2 == 0);
    }

    #[test]
    fn odd_terms_collapse_at_half(m in 1u32..=10, x in prop::sample::select(vec![1u32, 2, 10]), p in 64u32..=256) {
        let x = Rational::from(x);
        let even = eval_f(&TruncationSpec::of(1, 2, 2 * m), &x, p).unwrap();
        let odd = eval_f(&TruncationSpec::of(1, 2, 2 * m + 1), &x, p).unwrap();
        prop_assert!(even.intersects(&odd));
        let gap = Float::with_val(p, even.mid() - odd.mid()).abs();
        let half_widths = Float::with_val(p, even.width() + odd.width()) / 2u32;
        prop_assert!(gap <= half_widths);
    }

    #[test]
    fn derivative_of_l_is_f(spec in spec_strategy(16), x in x_strategy()) {
        let f = eval_f(&spec, &x, 128).unwrap();
        let dl = eval_l_derivative(&spec, 1, &x, 128).unwrap();
        prop_assert!(f.intersects(&dl), "{} vs {}", f, dl);
    }

    #[test]
    fn enclosures_are_ordered(spec in spec_strategy(16), x in x_strategy(), m in 0u32..=5) {
        let e = eval_l_derivative(&spec, m, &x, 96).unwrap();
        prop_assert!(e.lo() <= e.hi());
    }
}

#[test]
fn sign_rule_coherence() {
    let x = Rational::from((7, 2));
    for l in [Rational::new(), Rational::from((1, 2))] {
        for n in 1..=9 {
            let spec = TruncationSpec::new(l.clone(), n).unwrap();
            if !spec.validity().is_valid() {
                assert!(bound_psi_side(&spec, &x, 64).is_err());
                continue;
            }
            let (psi_dir, _) = bound_psi_side(&spec, &x, 64).unwrap();
            let (d_dir, _) = bound_derivative_side(&spec, 1, &x, 64).unwrap();
            assert_eq!(psi_dir, d_dir);
            assert_eq!(psi_dir, spec.validity());
            assert_eq!(derivative_direction(&spec, 0), psi_dir.flipped());
        }
    }
}

#[test]
fn quarter_truncations_are_valid() {
    let quarter = Rational::from((1, 4));
    for n in [3, 5, 7] {
        assert!(validity(n, &quarter).unwrap().is_valid(), "N = {n}");
    }
    assert_eq!(validity(1, &quarter).unwrap(), BoundDirection::LowerBound);
    assert_eq!(validity(3, &quarter).unwrap(), BoundDirection::UpperBound);
}

fn psi_query(x: &Rational, eps: f64) -> Query {
    Query::new(Target::Psi(0), x.clone(), eps)
}

fn grid_point() -> impl Strategy<Value = Rational> {
    prop_oneof![
        prop::sample::select(vec!["3/5", "1", "3/2", "2", "5", "10", "100"]).prop_map(|s| s.parse::<Rational>().unwrap()),
        (1i64..=20).prop_flat_map(|den| (1..=200 * den).prop_map(move |k| Rational::from((k, den)))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quarter_bracket_ordering(x in (1i64..=40).prop_flat_map(|den| (den / 4 + 1..=100 * den).prop_map(move |k| Rational::from((k, den))))) {
        prop_assume!(x > Rational::from((1, 4)));
        let lower = eval_f(&TruncationSpec::of(1, 4, 1), &x, 128).unwrap();
        let upper = eval_f(&TruncationSpec::of(1, 4, 3), &x, 128).unwrap();
        prop_assert!(lower.hi() < upper.lo());
    }

    #[test]
    fn different_plans_intersect(x in grid_point(), tight in any::<bool>()) {
        let eps = if tight { 1e-20 } else { 1e-8 };
        let (a, pa) = enclose(&psi_query(&x, eps)).unwrap();
        let (b, _) = enclose(&psi_query(&x, eps).lambda(Rational::new())).unwrap();
        let (c, _) = enclose(&psi_query(&x, eps).k(pa.k + 7)).unwrap();
        prop_assert!(a.lo() < a.hi());
        prop_assert!(a.intersects(&b) && a.intersects(&c) && b.intersects(&c));
    }

    #[test]
    fn functional_equation(x in grid_point()) {
        let (next, _) = enclose(&psi_query(&Rational::from(&x + 1u32), 1e-20)).unwrap();
        let (here, _) = enclose(&psi_query(&x, 1e-25)).unwrap();
        let shifted = here.add(&Enclosure::from_rational(&Rational::from(x.recip_ref()), 128));
        prop_assert!(next.intersects(&shifted));
        let (lg_next, _) = enclose(&Query::new(Target::LogGamma, Rational::from(&x + 1u32), 1e-20)).unwrap();
        let (lg, _) = enclose(&Query::new(Target::LogGamma, x.clone(), 1e-25)).unwrap();
        let ln_x = Enclosure::from_rational(&x, 128).ln().unwrap();
        prop_assert!(lg_next.intersects(&lg.add(&ln_x)));
    }

    #[test]
    fn plan_coherence(x in grid_point(), m in 0u32..=3, digits in 5i32..=40) {
        let eps = 10f64.powi(-digits);
        for target in [Target::Psi(m), Target::LogGamma] {
            let q = Query::new(target, x.clone(), eps);
            let p = plan(&q).unwrap();
            let d = target.log_gamma_order();
            prop_assert_eq!(derivative_direction(&p.lower_spec(), d), BoundDirection::LowerBound);
            prop_assert_eq!(derivative_direction(&p.upper_spec(), d), BoundDirection::UpperBound);
            prop_assert!(p.predicted_gap < eps / 4.0);
            prop_assert!(Rational::from(&x + p.k) >= Rational::from(&p.lambda + 1u32));
            let (e, used) = enclose(&q).unwrap();
            prop_assert!(e.width() <= eps);
            prop_assert!(used.k >= p.k && used.precision >= p.precision);
        }
    }

    #[test]
    fn sandwich_nesting(x in (1i64..=20).prop_flat_map(|den| (2 * den..=1000 * den).prop_map(move |k| Rational::from((k, den))))) {
        // [F_5, F_7] sits inside [F_1, F_3] at λ = 1/2 once x ≥ 2.
        let f = |n| eval_f(&TruncationSpec::of(1, 2, n), &x, 160).unwrap();
        let (f1, f3, f5, f7) = (f(1), f(3), f(5), f(7));
        prop_assert!(f1.hi() <= f5.lo() && f5.hi() <= f7.lo() && f7.hi() <= f3.lo());
    }
}
