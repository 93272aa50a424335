//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hhquad::bounds::{self, EndpointDerivs, DEFAULT_Q_GRID};
use hhquad::convexity;
use hhquad::harness::{self, load_config, Corpus, SanityOutcome};
use hhquad::kernel::{kernel_l1_norm, kernel_value, RuleOrder};
use hhquad::quadrature::{self, gauss, Interval};
use hhquad::{eval_jet, parse};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const IDENTITY_TOL: f64 = 1e-9;
const SPOT_REL_TOL: f64 = 1e-9;
const COLLAPSE_REL_TOL: f64 = 1e-12;
const KERNEL_ABS_TOL: f64 = 1e-12;
const POLY_TOL: f64 = 1e-12;
const DOMINATION_SLACK: f64 = 1e-12;
const IDENTITY_BUDGET: Duration = Duration::from_secs(5);

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/default.toml")
}

fn corpus() -> Corpus {
    load_config(&corpus_path()).expect("bundled corpus loads")
}

fn order(n: i64) -> RuleOrder {
    RuleOrder::new(n).unwrap()
}

fn rel_close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

/// Error identity over the corpus with n in 1..=6.
fn identity_over_corpus() -> Result<String, String> {
    let c = corpus();
    let start = Instant::now();
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for e in &c.entries {
        for n in 1..=6 {
            let r = quadrature::check_identity(&e.function, e.interval, order(n))
                .map_err(|err| format!("{} n={n}: {err}", e.name))?;
            let allowed = IDENTITY_TOL.max(IDENTITY_TOL * r.reference.abs());
            let residual = r.identity_residual();
            if residual > allowed {
                return Err(format!("{} n={n}: residual {residual:e} > {allowed:e}", e.name));
            }
            worst = worst.max(residual);
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    if cases != 36 {
        return Err(format!("expected 36 cases, ran {cases}"));
    }
    if elapsed > IDENTITY_BUDGET {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("36 cases, worst residual {worst:.2e}, {elapsed:.2?}"))
}

/// Closed-form spot checks.
fn spot_checks() -> Result<String, String> {
    let e = std::f64::consts::E;
    let unit = Interval::new(0.0, 1.0).unwrap();
    let check = |what: &str, got: f64, want: f64| {
        if rel_close(got, want, SPOT_REL_TOL) {
            Ok(())
        } else {
            Err(format!("{what}: got {got:.12}, want {want:.12}"))
        }
    };

    let f = parse("exp(x)").unwrap();
    let r = quadrature::check_identity(&f, unit, order(2)).map_err(|e| e.to_string())?;
    check("exp reference", r.reference, e - 1.0)?;
    check("exp reference (10 digits)", r.reference, 1.718_281_828_5)?;
    check("exp rule", r.rule_value, e.sqrt())?;
    check("exp rule (10 digits)", r.rule_value, 1.648_721_270_7)?;
    check("exp error", r.actual_error(), e - 1.0 - e.sqrt())?;
    let d = EndpointDerivs::new(1.0, e).unwrap();
    let eq3 = bounds::bound_convex(order(2), unit, d);
    check("exp convex bound", eq3, (1.0 + e) / 48.0)?;
    if eq3 - r.actual_error() < 0.0078 {
        return Err(format!("exp margin {} < 0.0078", eq3 - r.actual_error()));
    }

    let f = parse("x^2").unwrap();
    let r = quadrature::check_identity(&f, unit, order(2)).map_err(|e| e.to_string())?;
    check("x^2 error", r.actual_error(), 1.0 / 12.0)?;
    // The n=1 and n=2 rules coincide; 0.25 is the n=1 bound with |f'| = 0, 2.
    let plain = quadrature::corrected_midpoint(&f, unit, order(1)).map_err(|e| e.to_string())?;
    if plain.to_bits() != r.rule_value.to_bits() {
        return Err("x^2 n=1 and n=2 rules differ".into());
    }
    let jet_a = eval_jet(&f, 0.0, 1).unwrap().deriv(1);
    let jet_b = eval_jet(&f, 1.0, 1).unwrap().deriv(1);
    let eq3 = bounds::bound_convex(order(1), unit, EndpointDerivs::from_derivs(jet_a, jet_b).unwrap());
    check("x^2 convex bound", eq3, 0.25)?;
    if r.actual_error() > eq3 {
        return Err("x^2 bound does not dominate".into());
    }

    let f = parse("x^4").unwrap();
    let wide = Interval::new(0.0, 2.0).unwrap();
    let r = quadrature::check_identity(&f, wide, order(3)).map_err(|e| e.to_string())?;
    check("x^4 rule", r.rule_value, 6.0)?;
    check("x^4 error", r.actual_error(), 0.4)?;
    // By hand: 2^4 / (2^3 4!) * (|f'''(0)| + |f'''(2)|)/2 = (1/12) * 24.
    let fa = eval_jet(&f, 0.0, 3).unwrap().deriv(3);
    let fb = eval_jet(&f, 2.0, 3).unwrap().deriv(3);
    let eq3 = bounds::bound_convex(order(3), wide, EndpointDerivs::from_derivs(fa, fb).unwrap());
    check("x^4 convex bound", eq3, 16.0 / (8.0 * 24.0) * (0.0 + 48.0) / 2.0)?;
    if r.actual_error() > eq3 {
        return Err("x^4 bound does not dominate".into());
    }
    Ok("exp, x^2, x^4 match closed forms".into())
}

/// Power-mean bound at q = 1 equals the convex bound.
fn q_one_collapse() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let iv = Interval::new(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for _ in 0..100 {
            let d = EndpointDerivs::new(rng.random_range(0.0..=10.0), rng.random_range(0.0..=10.0)).unwrap();
            let convex = bounds::bound_convex(order(n), iv, d);
            let pm = bounds::bound_power_mean(order(n), iv, d, 1.0).unwrap();
            let rel = (pm - convex).abs() / convex.abs().max(f64::MIN_POSITIVE);
            if rel > COLLAPSE_REL_TOL {
                return Err(format!("n={n} {d:?}: {pm} vs {convex}"));
            }
            worst = worst.max(rel);
        }
    }
    Ok(format!("600 pairs, worst rel diff {worst:.2e}"))
}

/// Numeric L1 norm of the kernel against the closed form.
fn kernel_norms() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let k = order(n);
        let mut g = |t: f64| kernel_value(k, t).map(f64::abs);
        let mut numeric = 0.0;
        for (lo, hi) in [(0.0, 0.5), (0.5, 1.0)] {
            numeric += gauss::composite(&mut g, lo, hi, 8).map_err(|e| e.to_string())?.0;
        }
        let diff = (numeric - kernel_l1_norm(k)).abs();
        if diff > KERNEL_ABS_TOL {
            return Err(format!("n={n}: {numeric} vs {}", kernel_l1_norm(k)));
        }
        worst = worst.max(diff);
    }
    Ok(format!("n=1..8, worst abs diff {worst:.2e}"))
}

/// Random polynomials of degree n-1 are integrated exactly.
fn polynomial_exactness() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for case in 0..20 {
        let n: i64 = rng.random_range(1..=6);
        let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a: f64 = rng.random_range(-2.0..1.0);
        let b: f64 = a + rng.random_range(0.25..3.0);
        let src = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| format!("({c:?})*x^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let f = parse(&src).map_err(|e| e.to_string())?;
        let iv = Interval::new(a, b).unwrap();
        let antiderivative = |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32 + 1) / (k as f64 + 1.0))
                .sum::<f64>()
        };
        let exact = antiderivative(b) - antiderivative(a);
        let reach = a.abs().max(b.abs()).max(1.0);
        let scale = (b - a)
            * coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * reach.powi(k as i32))
                .sum::<f64>();
        let rule = quadrature::corrected_midpoint(&f, iv, order(n)).map_err(|e| e.to_string())?;
        let rem = quadrature::remainder_integral(&f, iv, order(n)).map_err(|e| e.to_string())?;
        if rem.abs() > POLY_TOL * scale {
            return Err(format!("case {case} ({src}): remainder {rem:e}"));
        }
        if (rule - exact).abs() > POLY_TOL * scale.max(exact.abs()) {
            return Err(format!("case {case} ({src}): rule {rule} vs exact {exact}"));
        }
    }
    Ok("20 random polynomials".into())
}

/// Every certified bound dominates the actual error.
fn domination_sweep() -> Result<String, String> {
    let c = corpus();
    let m = c.tolerances.convexity_grid;
    let tol = c.tolerances.convexity;
    let mut certified_checks = 0;
    for e in &c.entries {
        let (f, iv) = (&e.function, e.interval);
        let reference = quadrature::reference_integral(f, iv, 1e-12).map_err(|e| e.to_string())?;
        for n in 1..=4 {
            let n = order(n);
            let rule = quadrature::corrected_midpoint(f, iv, n).map_err(|e| e.to_string())?;
            let actual = (reference - rule).abs();
            let k = n.as_usize();
            let d = EndpointDerivs::from_derivs(
                eval_jet(f, iv.a(), k).unwrap().deriv(k),
                eval_jet(f, iv.b(), k).unwrap().deriv(k),
            )
            .unwrap();
            for cand in bounds::all_bounds(n, iv, d, &DEFAULT_Q_GRID).map_err(|e| e.to_string())? {
                let q = cand.q_used.filter(|&q| q != 1.0);
                let cert = convexity::certify_with_tolerance(f, iv, n, q, m, tol).map_err(|e| e.to_string())?;
                if !cert.certified {
                    continue;
                }
                certified_checks += 1;
                if actual > cand.value * (1.0 + DOMINATION_SLACK) + DOMINATION_SLACK {
                    return Err(format!(
                        "{} n={n} {:?} q={:?}: error {actual:e} > bound {:e}",
                        e.name, cand.theorem, cand.q_used, cand.value
                    ));
                }
            }
        }
    }
    let report = harness::run_check(&c, 4).map_err(|e| e.to_string())?;
    if report.violations() != 0 {
        return Err(format!("{} violated rows", report.violations()));
    }
    // 6 entries x 4 orders x (1 convex + 4 Hölder + 5 power-mean) candidates.
    if certified_checks != 6 * 4 * 10 {
        return Err(format!("only {certified_checks} of 240 candidates certified"));
    }
    Ok(format!("{certified_checks} certified candidates, zero violations"))
}

/// Adding an odd-index term leaves the rule bitwise unchanged.
fn even_order_collapse() -> Result<String, String> {
    let c = corpus();
    for e in &c.entries {
        for m in 1..=3 {
            let even = quadrature::corrected_midpoint(&e.function, e.interval, order(2 * m)).unwrap();
            let odd = quadrature::corrected_midpoint(&e.function, e.interval, order(2 * m - 1)).unwrap();
            if even.to_bits() != odd.to_bits() {
                return Err(format!("{} m={m}: {even:e} vs {odd:e}", e.name));
            }
        }
    }
    Ok("all corpus functions, m=1..3".into())
}

/// Mean-value sandwich on every convex corpus entry.
fn hh_sanity() -> Result<String, String> {
    let c = corpus();
    let mut convex = Vec::new();
    for e in &c.entries {
        match harness::run_hh_sanity(e, &c.tolerances).map_err(|e| e.to_string())? {
            SanityOutcome::Pass => convex.push(e.name.as_str()),
            SanityOutcome::Fail => return Err(format!("{} fails the sandwich", e.name)),
            SanityOutcome::NotApplicable => {}
        }
    }
    let expected = ["exp", "square", "quartic", "reciprocal", "quartic_wide"];
    if convex != expected {
        return Err(format!("convex entries {convex:?}, expected {expected:?}"));
    }
    Ok(format!("{} convex entries pass", convex.len()))
}

/// `check` output does not depend on the worker count.
fn determinism() -> Result<String, String> {
    let run = |jobs: &str, format: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_hhquad"))
            .args(["check", corpus_path().to_str().unwrap(), "--jobs", jobs, "--format", format])
            .env_remove(harness::SINGLE_THREAD_ENV)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    for format in ["csv", "json"] {
        let one = run("1", format)?;
        let eight = run("8", format)?;
        if one != eight {
            return Err(format!("{format} reports differ between --jobs 1 and --jobs 8"));
        }
        if one.is_empty() {
            return Err(format!("{format} report is empty"));
        }
    }
    Ok("csv and json byte-identical for --jobs 1 and 8".into())
}

type Criterion = (&'static str, fn() -> Result<String, String>);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("AC1 identity over corpus, n=1..6", identity_over_corpus),
        ("AC2 closed-form spot checks", spot_checks),
        ("AC3 power-mean q=1 collapse", q_one_collapse),
        ("AC4 kernel L1 norm", kernel_norms),
        ("AC5 polynomial exactness", polynomial_exactness),
        ("AC6 domination sweep", domination_sweep),
        ("AC7 even-order collapse", even_order_collapse),
        ("AC8 mean-value sandwich", hh_sanity),
        ("AC9 determinism across thread counts", determinism),
    ];
    let mut failed = Vec::new();
    // Written to the real stderr so the lines show without --nocapture.
    let mut err = std::io::stderr();
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => writeln!(err, "PASS {name}: {detail}").unwrap(),
            Err(detail) => {
                writeln!(err, "FAIL {name}: {detail}").unwrap();
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
