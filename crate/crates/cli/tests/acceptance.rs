//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use qexp::orlicz::exp_norm;
use qexp::{HermitianElement, PositiveFunctional};
use qexp_cli::output;
use qexp_cli::suite::{outcome_json, run_suite, SuiteOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

struct Line {
    ok: bool,
    detail: String,
}

fn suite(dims: &[usize], trials: usize, names: &[&str]) -> SuiteOutcome {
    let only: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    run_suite(dims, trials, SEED, &only).expect("suite parameters are valid")
}

/// Worst value of `name`, checked as `worst < bound` or `worst > bound`.
fn bounded(o: &SuiteOutcome, name: &str, below: bool, bound: f64) -> (bool, String) {
    let s = o.summary(name).expect("invariant ran");
    let ok = s.failed == 0 && if below { s.worst < bound } else { s.worst > bound };
    let rel = if below { "<" } else { ">" };
    (ok, format!("{name}: worst {:.3e} over {} ({rel} {bound:e})", s.worst, s.instances))
}

fn combine(parts: Vec<(bool, String)>) -> Line {
    Line {
        ok: parts.iter().all(|p| p.0),
        detail: parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "),
    }
}

fn criterion_1() -> Line {
    let t = Instant::now();
    let o = suite(&[2, 3, 4], 100, &["donald_identity"]);
    let el = t.elapsed();
    let (ok, d) = bounded(&o, "donald_identity", true, 1e-9);
    Line {
        ok: ok && el < Duration::from_secs(5),
        detail: format!("{d}; {:.2} s (< 5 s)", el.as_secs_f64()),
    }
}

fn criterion_2() -> Line {
    let o = suite(&[2, 3, 4], 100, &["perturbed_entropy", "chain_rule"]);
    combine(vec![
        bounded(&o, "perturbed_entropy", true, 1e-9),
        bounded(&o, "chain_rule", true, 1e-9),
    ])
}

fn criterion_3() -> Line {
    let o = suite(&[2, 3, 4], 50, &["gradient"]);
    combine(vec![bounded(&o, "gradient", true, 1e-6)])
}

fn criterion_4() -> Line {
    let o = suite(&[2, 3], 25, &["conjugate_duality", "fenchel_young"]);
    let mut parts = vec![
        bounded(&o, "conjugate_duality", true, 1e-4),
        bounded(&o, "fenchel_young", true, 1e-8),
    ];
    parts[1].1.push_str(" (10 pairs per instance)");
    combine(parts)
}

/// `Σ ρ_i (cosh(a_i/λ) − 1) = 1` solved for `λ` by plain bisection.
fn scalar_root_oracle(rho: &[f64], a: &[f64]) -> f64 {
    let young = |lam: f64| rho.iter().zip(a).map(|(r, x)| r * ((x / lam).cosh() - 1.0)).sum::<f64>();
    let (mut lo, mut hi): (f64, f64) = (1e-6, 1e6);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if young(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_5() -> Line {
    let o = suite(&[2, 3, 4], 100, &["commutative_reduction"]);
    let mut parts = vec![bounded(&o, "commutative_reduction", true, 1e-12)];

    let rho = PositiveFunctional::diag(&[0.5, 0.5]).unwrap();
    let a = HermitianElement::diag(&[1.0, -1.0]);
    let worked = exp_norm(&rho, &a).unwrap().norm;
    let target = 1.0 / 2f64.acosh();
    parts.push((
        (worked - target).abs() < 1e-6,
        format!("worked example {worked:.9} vs 1/arccosh(2) = {target:.9}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let r: Vec<f64> = w.iter().map(|x| x / total).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lib = exp_norm(&PositiveFunctional::diag(&r).unwrap(), &HermitianElement::diag(&x)).unwrap().norm;
        let oracle = scalar_root_oracle(&r, &x);
        worst = worst.max((lib - oracle).abs() / oracle.max(1.0));
    }
    parts.push((worst < 1e-6, format!("diagonal norms vs scalar roots: worst {worst:.3e} over 100 (< 1e-6)")));
    combine(parts)
}

fn criterion_6() -> Line {
    let o = suite(&[2, 3, 4], 100, &["renyi_monotone", "renyi_limit"]);
    combine(vec![
        bounded(&o, "renyi_monotone", true, 1e-10),
        bounded(&o, "renyi_limit", true, 1e-2),
    ])
}

fn criterion_7() -> Line {
    let o = suite(&[2, 3, 4], 100, &["f_monotonicity", "lp_contraction", "log_norm_contraction"]);
    combine(vec![
        bounded(&o, "f_monotonicity", false, -1e-8),
        bounded(&o, "lp_contraction", false, -1e-8),
        bounded(&o, "log_norm_contraction", true, 1e-6),
    ])
}

fn criterion_8() -> Line {
    let o = suite(
        &[2, 3, 4],
        100,
        &["sufficiency_positive", "sufficiency_negative", "petz_identities", "transport_family"],
    );
    combine(vec![
        bounded(&o, "sufficiency_positive", true, 1e-8),
        bounded(&o, "sufficiency_negative", false, 1e-8),
        bounded(&o, "petz_identities", true, 1e-8),
        bounded(&o, "transport_family", true, 1e-8),
    ])
}

fn criterion_9() -> Line {
    let o = suite(&[2, 3, 4], 100, &["divergence_forms", "pythagorean"]);
    combine(vec![
        bounded(&o, "divergence_forms", true, 1e-9),
        bounded(&o, "pythagorean", true, 1e-9),
    ])
}

fn criterion_10() -> Line {
    let o = suite(&[2, 3, 4], 100, &["kosaki_lower_bound"]);
    combine(vec![bounded(&o, "kosaki_lower_bound", true, 1e-9)])
}

fn criterion_11() -> Line {
    let o = suite(&[2], 20, &["series_oracle"]);
    combine(vec![bounded(&o, "series_oracle", true, 1e-4)])
}

fn criterion_12() -> Line {
    let dims = [2, 3, 4];
    let t = Instant::now();
    let first = suite(&dims, 100, &[]);
    let el = t.elapsed();
    // a different thread count must not change a single byte
    std::env::set_var("QIG_THREADS", "3");
    let second = suite(&dims, 100, &[]);
    std::env::remove_var("QIG_THREADS");
    let a = output::to_string(&outcome_json(&dims, 100, SEED, &first));
    let b = output::to_string(&outcome_json(&dims, 100, SEED, &second));
    let failed: Vec<&str> = first.summaries.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
    Line {
        ok: first.passed() && a == b && el < Duration::from_secs(120),
        detail: format!(
            "{} invariants, {} instances, {:.1} s (< 120 s), identical reports: {}, failing: {:?}",
            first.summaries.len(),
            first.summaries.iter().map(|s| s.instances).sum::<usize>(),
            el.as_secs_f64(),
            a == b,
            failed
        ),
    }
}

fn main() {
    let criteria: [fn() -> Line; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let line = c();
        if !line.ok {
            failures += 1;
        }
        println!("criterion {}: {} ({})", i + 1, if line.ok { "PASS" } else { "FAIL" }, line.detail);
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
