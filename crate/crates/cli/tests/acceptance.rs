//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gammabound::bernoulli::{default_root_tolerance, eval_poly, bernoulli_number, lambda0, parse_rational};
use gammabound::engine::{derivative_direction, optimal_pair};
use gammabound::expansions::{first_omitted_term_exact, Family};
use gammabound::verify::{
    check_complete_monotonicity, check_oracle_pair, check_remainder_sign, find_sign_change, gamma_sandwich_check,
    log_grid, oracle_pairs, sandwich_nesting_check, sign_table_specs, Sign,
};
use gammabound::{enclose, plan, BoundDirection, Enclosure, Float, Query, Rational, Target, TruncationSpec};
use rug::float::Round;
use rug::ops::Pow;

type Outcome = Result<String, String>;

fn rat(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn pow10_neg(d: u32) -> Rational {
    Rational::from((1, rug::Integer::from(10u32).pow(d)))
}

fn float(s: &str) -> Float {
    Float::with_val(64, Float::parse(s).unwrap())
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_gammabound"))
        .args(["eval", "--function", "psi", "--x", "1", "--digits", "20", "--json"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let (lo, hi) = (rat(v["lo"].as_str().unwrap()), rat(v["hi"].as_str().unwrap()));
    let target = rat("-0.57721566490153286061");
    let width = Rational::from(&hi - &lo);
    ensure(
        lo <= target && target <= hi && width <= pow10_neg(20) && elapsed < Duration::from_secs(1),
        format!("[{}, {}] width {} in {:?}", v["lo"], v["hi"], v["width"], elapsed),
    )
}

fn c2() -> Outcome {
    let spec = TruncationSpec::of(1, 2, 9);
    let term = first_omitted_term_exact(&spec, &rat("100"), Family::Psi).map_err(|e| e.to_string())?;
    let literal = rat("511/67584") * Rational::from((2, 199)).pow(10);
    // Rational factor times a float power, rounded up.
    let pow = Float::with_val_round(256, Float::with_val(256, 99.5).pow(-10), Round::Up).0;
    let upper = Float::with_val_round(256, &pow * &rat("511/67584"), Round::Up).0;
    ensure(
        term == literal && term < pow10_neg(22) && upper < float("1e-22"),
        format!("(511/67584)·99.5^-10 = {:.6e} < 1e-22", term.to_f64()),
    )
}

fn c3() -> Outcome {
    let half = rat("1/2");
    let (first, _) = optimal_pair(Target::Psi(0), &half, 99.5).map_err(|e| e.to_string())?;
    let eps = float("1e-270");
    // Evaluating the expansion at 100 means a shift of 99 from x = 1.
    let q = Query::with_eps(Target::Psi(0), rat("1"), eps.clone()).lambda(half).n(first).k(99).precision(1024);
    let start = Instant::now();
    let (e, p) = enclose(&q).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let terms = p.series_terms();
    ensure(
        e.width() < eps && (250..=350).contains(&terms) && p.precision >= 1000 && elapsed < Duration::from_secs(60),
        format!("{terms} terms, {} bits, width {:.3e}, {:?}", p.precision, e.width().to_f64(), elapsed),
    )
}

fn c4() -> Outcome {
    let start = Instant::now();
    let half = rat("1/2");
    let quarter = rat("1/4");
    let mut bad = Vec::new();
    for n in 0..=60u32 {
        let factor = Rational::from(1) - Rational::from((1, 2)).pow(n as i32 - 1);
        if eval_poly(n, &half) != -(factor * bernoulli_number(n)) {
            bad.push(format!("half n={n}"));
        }
    }
    for n in 1..=50u32 {
        if eval_poly(2 * n, &quarter) != eval_poly(2 * n, &half) * Rational::from((1, 4)).pow(n as i32) {
            bad.push(format!("quarter N={n}"));
        }
    }
    let elapsed = start.elapsed();
    ensure(bad.is_empty() && elapsed < Duration::from_secs(5), format!("mismatches {bad:?} in {elapsed:?}"))
}

fn c5() -> Outcome {
    let quarter = rat("1/4");
    let mut prev: Option<Rational> = None;
    for m in (2..=40).step_by(2) {
        let br = lambda0(m, &default_root_tolerance()).map_err(|e| e.to_string())?;
        let gap = Rational::from(&quarter - &br.hi);
        if gap <= 0 || prev.as_ref().is_some_and(|p| gap >= *p) {
            return Err(format!("M = {m}: 1/4 − hi = {gap}"));
        }
        prev = Some(gap);
    }
    Ok(format!("M ≤ 40, smallest 1/4 − hi = {:.3e}", prev.unwrap().to_f64()))
}

fn c6() -> Outcome {
    let eps = float("1e-30");
    for x in ["0.6", "1", "2", "10", "100"] {
        let x = rat(x);
        let (psi, _) = enclose(&Query::with_eps(Target::Psi(0), x.clone(), eps.clone())).map_err(|e| e.to_string())?;
        if psi.width() > eps {
            return Err(format!("width at {x}"));
        }
        let y = Rational::from(&x - rat("1/2"));
        let log_y = Enclosure::from_rational(&y, 256).ln().map_err(|e| e.to_string())?;
        let corr = Enclosure::from_rational(&(Rational::from(y.recip_ref()).pow(2) / 24u32), 256);
        let upper = log_y.add(&corr);
        if !(psi.lo() > log_y.hi() && psi.hi() < upper.lo()) {
            return Err(format!("comparison fails at x = {x}"));
        }
    }
    Ok("log(x − 1/2) < ψ(x) < log(x − 1/2) + (x − 1/2)^-2/24 strict at 0.6, 1, 2, 10, 100".into())
}

fn c7() -> Outcome {
    let mut failures = Vec::new();
    for spec in sign_table_specs() {
        for x in ["2", "5", "20"] {
            let r = check_remainder_sign(&spec, &rat(x)).map_err(|e| e.to_string())?;
            if !r.passed() {
                failures.push(format!("({}, {}) at {x}", spec.lambda(), spec.n()));
            }
        }
    }
    // Log grid strictly inside (0.3, 20).
    let grid: Vec<Rational> = log_grid(0.3, 20.0, 26).into_iter().skip(1).take(24).collect();
    let r = find_sign_change(&TruncationSpec::of(1, 4, 2), &grid).map_err(|e| e.to_string())?;
    let signs: String = r.signs.iter().map(|s| match s { Sign::Positive => '+', Sign::Negative => '-', Sign::Indeterminate => '?' }).collect();
    let table = if failures.is_empty() { "21/21 remainder signs ok".to_string() } else { format!("remainder sign failures {failures:?}") };
    let change = match &r.first_change {
        Some((a, b)) => format!("sign change in ({a}, {b})"),
        None => format!("no sign change of ψ − F_2(1/4; ·) on (0.3, 20): signs {signs}"),
    };
    ensure(failures.is_empty() && r.first_change.is_some(), format!("{table}; {change}"))
}

fn c8() -> Outcome {
    let cases = [
        (TruncationSpec::of(1, 2, 3), ["3/4", "1", "2", "5", "10"]),
        (TruncationSpec::of(0, 1, 4), ["1/2", "1", "2", "3", "10"]),
        (TruncationSpec::of(0, 1, 2), ["1/2", "1", "2", "3", "10"]),
    ];
    let mut count = 0;
    for (spec, grid) in cases {
        let grid: Vec<Rational> = grid.iter().map(|s| rat(s)).collect();
        let reports = check_complete_monotonicity(&spec, 6, &grid).map_err(|e| e.to_string())?;
        for (m, r) in reports.iter().enumerate() {
            if !r.all(Sign::Positive) {
                return Err(format!("({}, {}) m = {m}: {:?}", spec.lambda(), spec.n(), r.signs));
            }
            count += r.signs.len();
        }
    }
    Ok(format!("{count} certified positive signs, m ≤ 6"))
}

fn c9() -> Outcome {
    let grid: Vec<Rational> = ["0.6", "1", "2", "3.5", "10"].iter().map(|s| rat(s)).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [1, 2] {
        let r = gamma_sandwich_check(n, &grid).map_err(|e| e.to_string())?;
        ok &= r.passed();
        parts.push(format!("sandwich N={n}: {}", r.status));
    }
    let nest = sandwich_nesting_check(1, &grid).map_err(|e| e.to_string())?;
    ok &= nest.passed();
    parts.push(format!("nesting N=2 in N=1: {} ({})", nest.status, nest.detail));
    ensure(ok, parts.join("; "))
}

fn c10() -> Outcome {
    let pairs = oracle_pairs();
    for (x, y) in &pairs {
        let r = check_oracle_pair(x, y, 20_000).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(r.detail);
        }
    }
    let eps = float("5e-26");
    let a = enclose(&Query::with_eps(Target::Psi(0), rat("2"), eps.clone())).map_err(|e| e.to_string())?.0;
    let b = enclose(&Query::with_eps(Target::Psi(0), rat("1"), eps)).map_err(|e| e.to_string())?.0;
    let d = a.sub(&b);
    ensure(
        d.contains_rational(&rat("1")) && d.width() <= float("1e-25"),
        format!("{} oracle pairs agree; ψ(2) − ψ(1) width {:.3e}", pairs.len(), d.width().to_f64()),
    )
}

fn c11() -> Outcome {
    let xs = ["1/10", "1/2", "1", "3/2", "7/3", "10", "1000"];
    let targets = [Target::Psi(0), Target::Psi(1), Target::Psi(3), Target::LogGamma, Target::Gamma];
    let mut checks = 0;
    for x in xs {
        let x = rat(x);
        for t in targets {
            // Containment monotonicity: tighter tolerances give narrower
            // enclosures that still meet the looser ones.
            let mut prev: Option<Enclosure> = None;
            for eps in ["1e-10", "1e-20", "1e-30"] {
                let eps = if t == Target::Gamma {
                    let (g, _) = enclose(&Query::new(Target::Gamma, x.clone(), 1.0)).map_err(|e| e.to_string())?;
                    Float::with_val(64, g.mag() * float(eps))
                } else {
                    float(eps)
                };
                let q = Query::with_eps(t, x.clone(), eps.clone());
                let p = plan(&q).map_err(|e| e.to_string())?;
                let d = t.log_gamma_order();
                if derivative_direction(&p.lower_spec(), d) != BoundDirection::LowerBound
                    || derivative_direction(&p.upper_spec(), d) != BoundDirection::UpperBound
                {
                    return Err(format!("plan directions for {t} at {x}"));
                }
                let (e, _) = enclose(&q).map_err(|e| e.to_string())?;
                if e.width() > eps || prev.as_ref().is_some_and(|pr| !pr.intersects(&e) || e.width() > pr.width()) {
                    return Err(format!("containment for {t} at {x}"));
                }
                prev = Some(e);
                checks += 1;
            }
        }
        // Functional equations at tolerance 1e-30.
        let eps = float("1e-30");
        let get = |t: Target, x: &Rational| enclose(&Query::with_eps(t, x.clone(), eps.clone())).map(|v| v.0);
        let x1 = Rational::from(&x + 1u32);
        let psi_step = get(Target::Psi(0), &x1).and_then(|a| Ok(a.sub(&get(Target::Psi(0), &x)?))).map_err(|e| e.to_string())?;
        let lg_step = get(Target::LogGamma, &x1).and_then(|a| Ok(a.sub(&get(Target::LogGamma, &x)?))).map_err(|e| e.to_string())?;
        let log_x = Enclosure::from_rational(&x, 256).ln().map_err(|e| e.to_string())?;
        if !psi_step.contains_rational(&Rational::from(x.recip_ref())) || !lg_step.intersects(&log_x) {
            return Err(format!("functional equation at {x}"));
        }
        checks += 2;
    }
    Ok(format!("{checks} containment, plan and functional-equation checks"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("psi(1) to 20 digits from the CLI", c1),
        ("first omitted term below 1e-22", c2),
        ("deep run width below 1e-270", c3),
        ("Bernoulli identities", c4),
        ("root brackets below 1/4", c5),
        ("digamma inequality spot checks", c6),
        ("remainder sign table and sign change", c7),
        ("complete monotonicity sampling", c8),
        ("Sonin sandwich and nesting", c9),
        ("series oracle cross-check", c10),
        ("property grid", c11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
