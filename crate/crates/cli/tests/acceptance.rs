//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crlab::algebra::{rat, GaussianRational};
use crlab::closed_form::{
    default_pairing, make_solution, pairing_finding, residual_log_equation, tensors_at, ClosedFormSolution, HPoint,
};
use crlab::jets::canonical_words;
use crlab::numeric::{cr_jets_from_taylor, family_expression, fd_crosscheck, taylor_eval, FdSteps, RealPoint};
use crlab::quadrature::{check_integral_hypotheses, growth_exponent, GrowthReport, GrowthSpec};
use crlab::quantities::{
    coefficient_bounds_check, psi_m0_specialization, psi_squares_numeric, psi_squares_symbolic, tensor_identity_tests,
    verify_identity_with, verify_in, IdentityId, WeightedTerm, Mutation, ParamMode, ResidualStatus, TwistSign,
    VerifyOptions,
};
use crlab::jets::CRContext;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn verify(id: IdentityId, n: usize, opts: &VerifyOptions) -> Result<(), String> {
    let r = verify_identity_with(id, n, opts).map_err(|e| e.to_string())?;
    match r.status() {
        ResidualStatus::Zero => Ok(()),
        other => Err(format!("{id} n={n} {}: {other:?}", opts.mode)),
    }
}

fn weighted_identity() -> Outcome {
    let start = Instant::now();
    let mut cases = vec![(1, ParamMode::Formal), (2, ParamMode::Formal)];
    cases.extend([rat(0, 1), rat(1, 2), rat(1, 1)].into_iter().map(|m| (3, ParamMode::Rational(m))));
    for (n, mode) in &cases {
        let opts = VerifyOptions { mode: mode.clone(), ..Default::default() };
        if let Err(e) = verify(IdentityId::Weighted, *n, &opts) {
            return outcome(false, e);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let printed = VerifyOptions { sign: TwistSign::Plus, ..Default::default() };
    let printed_fails = verify(IdentityId::Weighted, 2, &printed).is_err();
    outcome(
        secs < 300.0,
        format!("{} cases zero in {secs:.1} s; printed c5 sign fails at n=2: {printed_fails}", cases.len()),
    )
}

fn supporting_identities() -> Outcome {
    let ids = [
        IdentityId::Unweighted,
        IdentityId::WeightDerivative,
        IdentityId::GDerivativePair,
        IdentityId::TimeFlux,
        IdentityId::GradientFlux,
        IdentityId::PowerFlux,
        IdentityId::Combination,
    ];
    for n in 1..=2 {
        for id in ids {
            if let Err(e) = verify(id, n, &VerifyOptions::default()) {
                return outcome(false, e);
            }
        }
    }
    outcome(true, format!("{} identities zero for n = 1, 2", ids.len()))
}

fn mutations() -> Outcome {
    let ctx = CRContext::new(2).unwrap();
    let all: Vec<Mutation> =
        (1..=6).map(Mutation::BumpCoefficient).chain(WeightedTerm::ALL.into_iter().map(Mutation::DropTerm)).collect();
    let mut caught = 0;
    for &m in &all {
        let opts = VerifyOptions { mutation: Some(m), ..Default::default() };
        match verify_in(&ctx, IdentityId::Weighted, &opts).status() {
            ResidualStatus::Nonzero { witness } if !witness.is_empty() => caught += 1,
            other => return outcome(false, format!("{m} not caught: {other:?}")),
        }
    }
    outcome(caught == all.len(), format!("{caught}/{} mutations rejected with a witness", all.len()))
}

fn psi() -> Outcome {
    let sign = TwistSign::default();
    for k in 1..=2 {
        let checks =
            psi_squares_symbolic(k, &ParamMode::Formal, sign).into_iter().chain(psi_m0_specialization(k, sign));
        for c in checks {
            if !c.status.is_zero() {
                return outcome(false, format!("k={k} {}: {:?}", c.label, c.status));
            }
        }
    }
    let num = psi_squares_numeric(3, 10_000, 3, 1e-10, sign);
    outcome(num.passed(), format!("symbolic zero; 10^4 samples max rel err {:.2e} (tol 1e-10)", num.max_rel_err))
}

fn coefficient_bounds() -> Outcome {
    let r = coefficient_bounds_check(5, 100_000, &rat(99, 100));
    outcome(r.passed(), format!("10^5 samples, violations {:?}, min slack {:?}", r.violations, r.min_slack))
}

fn tensor_chain() -> Outcome {
    let reports: Vec<_> = [2, 3].into_iter().map(|n| tensor_identity_tests(6, 10_000, n)).collect();
    let passed = reports.iter().all(|r| r.passed());
    let detail = reports
        .iter()
        .map(|r| {
            format!(
                "n={}: {} eq / {} ineq / {} cs failures",
                r.n, r.equality_failures, r.inequality_failures, r.cauchy_schwarz_failures
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, detail)
}

fn closed_form_family() -> Outcome {
    let finding = pairing_finding();
    let pairing = default_pairing();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=2 {
        for _ in 0..20 {
            let sol = ClosedFormSolution::random(&mut rng, n, pairing);
            let f = sol.log_function();
            for _ in 0..100 {
                let p = HPoint::random(&mut rng, n);
                let ok = residual_log_equation(&f, &p).is_ok_and(|r| r.is_zero()) && tensors_at(&f, &p).is_ok_and(|t| t.all_zero());
                if !ok {
                    return outcome(false, format!("n={n} mu={:?} lambda={} at {p:?}", sol.mu, sol.lambda));
                }
            }
        }
    }
    let passed = finding.mu_z_zero && !finding.mu_zbar_zero;
    outcome(passed, format!("2 x 20 x 100 points exact zero; {}", finding.summary()))
}

fn ad_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sol = ClosedFormSolution::random(&mut rng, 2, default_pairing());
    let expr = family_expression(&sol);
    let exact = sol.log_function();
    let (mut jet_err, mut fd_err) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let hp = HPoint::random(&mut rng, 2);
        let p = RealPoint::from_hpoint(&hp);
        let ad = match taylor_eval(&expr, &p) {
            Ok(tv) => cr_jets_from_taylor(&tv, &p),
            Err(e) => return outcome(false, e.to_string()),
        };
        let ex = match exact.jet_values(&hp) {
            Ok(j) => j,
            Err(e) => return outcome(false, e.to_string()),
        };
        for len in 1..=3 {
            for w in canonical_words(2, len) {
                let b = ex.get(&w).to_complex();
                jet_err = jet_err.max((ad.get(&w) - b).norm() / b.norm().max(1.0));
            }
        }
        match fd_crosscheck(&expr, &p, FdSteps::default()) {
            Ok(r) => fd_err = fd_err.max(r.max_deviation),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(
        jet_err <= 1e-9 && fd_err <= 1e-6,
        format!("50 points: jets max rel err {jet_err:.2e} (tol 1e-9), FD {fd_err:.2e} (tol 1e-6)"),
    )
}

fn quadrature() -> Outcome {
    let sol = make_solution(2, vec![GaussianRational::zero(); 2], GaussianRational::i(), default_pairing()).unwrap();
    let spec = GrowthSpec::standard(7);
    let timed = |f: &dyn Fn() -> Result<GrowthReport, String>| {
        let start = Instant::now();
        let r = f();
        (r, start.elapsed().as_secs_f64())
    };
    let (volume, volume_secs) = timed(&|| growth_exponent(&sol, 0.0, 0.0, &spec).map_err(|e| e.to_string()));
    let mut passed = volume.as_ref().is_ok_and(|r| (r.slope - 6.0).abs() <= spec.tolerance);
    let mut parts = Vec::new();
    let mut record = |label: &str, r: Result<GrowthReport, String>, near: Option<f64>, secs: f64| match r {
        Ok(r) => {
            let near_ok = near.is_none_or(|v| (r.tail_slope - v).abs() <= spec.tolerance);
            passed &= r.passed && near_ok && secs <= 120.0;
            parts.push(format!("{label} slope {:.2} (tail {:.2}) bound {}", r.slope, r.tail_slope, r.bound));
        }
        Err(e) => {
            passed = false;
            parts.push(format!("{label}: {e}"));
        }
    };
    record("(0,0)", volume, Some(6.0), volume_secs);
    let (r, s) = timed(&|| growth_exponent(&sol, 2.0, 0.0, &spec).map_err(|e| e.to_string()));
    record("(2,0)", r, Some(2.0), s);
    for q in [3.0, 0.0, 0.5, 1.0, 2.0] {
        let (r, s) = timed(&|| check_integral_hypotheses(&sol, q, &spec).map(|(_, r)| r).map_err(|e| e.to_string()));
        record(&format!("u^{q}"), r, None, s);
    }
    outcome(passed, parts.join("; "))
}

fn cli_report() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_crlab"))
            .args(["--seed", "3", "verify", "lemma1", "--n", "1", "--m", "formal"])
            .env_remove("CRLAB_SEED")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let json: serde_json::Value = match serde_json::from_slice(&a.stdout) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("report is not JSON: {e}")),
    };
    let schema = schema_problems(&json);
    let residual_zero = json["results"][0]["value"] == "zero";
    let identical = a.stdout == b.stdout;
    outcome(
        a.status.code() == Some(0) && schema.is_empty() && residual_zero && identical,
        format!("exit {:?}, schema problems {schema:?}, byte-identical repeat: {identical}", a.status.code()),
    )
}

fn schema_problems(v: &serde_json::Value) -> Vec<String> {
    let mut out = Vec::new();
    let Some(obj) = v.as_object() else { return vec!["not an object".into()] };
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    for k in ["command", "inputs", "seed", "results", "elapsed"] {
        if !keys.contains(&k) {
            out.push(format!("missing {k}"));
        }
    }
    for k in &keys {
        if !["command", "inputs", "seed", "results", "elapsed"].contains(k) {
            out.push(format!("unexpected {k}"));
        }
    }
    for r in v["results"].as_array().into_iter().flatten() {
        let Some(r) = r.as_object() else {
            out.push("result not an object".into());
            continue;
        };
        if !r.get("name").is_some_and(|n| n.is_string()) {
            out.push("result without name".into());
        }
        if !matches!(r.get("status").and_then(|s| s.as_str()), Some("pass" | "fail" | "info")) {
            out.push("bad status".into());
        }
        for k in r.keys() {
            if !["name", "status", "witness", "value", "tolerance"].contains(&k.as_str()) {
                out.push(format!("unexpected result key {k}"));
            }
        }
    }
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("weighted divergence identity", weighted_identity),
        ("supporting identities", supporting_identities),
        ("mutations rejected", mutations),
        ("psi completed squares", psi),
        ("coefficient lower bounds", coefficient_bounds),
        ("tensor inequality chain", tensor_chain),
        ("explicit family exact", closed_form_family),
        ("numeric vs exact jets", ad_consistency),
        ("quadrature exponents", quadrature),
        ("cli report", cli_report),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failures += usize::from(!o.passed);
        println!(
            "criterion {:>2} {} {name} ({:.1} s): {}",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
