//! One function per subcommand, each returning the report rows.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crlab::algebra::GaussianRational;
use crlab::closed_form::{
    make_solution, pairing_finding, pointwise_decay_check, residual_with, tensors_from_jets, ClosedFormSolution, HPoint,
    Pairing,
};
use crlab::jets::{canonical_words, word_to_string};
use crlab::numeric::{
    cr_jets_from_taylor, family_expression, fd_crosscheck, residual_from_jets, taylor_eval, FdSteps, RealPoint,
};
use crlab::quadrature::{check_integral_hypotheses, growth_exponent, GrowthReport, GrowthSpec};
use crlab::quantities::{
    coefficient_bounds_check, verify_identity_with, IdentityId, Mutation, ParamMode, ResidualStatus, TwistSign,
    VerifyOptions,
};
use crlab::syntax::{parse_config, parse_expression, parse_point, parse_rational, parse_solution};

use crate::report::CheckResult;
use crate::{Context, GrowthArgs, SeriesArgs, SolutionArgs, SolutionSource, IntegralArgs, UsageError, VerifyArgs};

fn check_n(n: usize) -> Result<usize, UsageError> {
    if (1..=9).contains(&n) {
        Ok(n)
    } else {
        Err(UsageError(format!("n = {n} outside 1..=9")))
    }
}

pub fn verify(ctx: &mut Context, a: &VerifyArgs) -> Result<Vec<CheckResult>, UsageError> {
    let n = check_n(ctx.pick("n", a.n, 1)?)?;
    let ids: Vec<IdentityId> = if a.identity == "all" { IdentityId::ALL.to_vec() } else { vec![a.identity.parse()?] };
    ctx.input("identity", &a.identity);
    let m: String = ctx.pick("m", a.m.clone(), "formal".to_string())?;
    let mode = if m == "formal" { ParamMode::Formal } else { ParamMode::Rational(parse_rational(&m)?) };
    let mutation = match &a.mutate {
        Some(s) => {
            ctx.input("mutate", s);
            Some(s.parse::<Mutation>()?)
        }
        None => None,
    };
    let sign_text: String = ctx.pick("c5-sign", a.c5_sign.clone(), "minus".to_string())?;
    let sign = TwistSign::parse(&sign_text).ok_or_else(|| UsageError(format!("--c5-sign expects minus or plus, got `{sign_text}`")))?;
    let opts = VerifyOptions { mode, mutation, sign };
    let mut rows = Vec::new();
    for id in ids {
        let report = verify_identity_with(id, n, &opts)?;
        for check in &report.checks {
            let name = format!("{id}: {}", check.label);
            rows.push(match &check.status {
                ResidualStatus::Zero => CheckResult::new(name, true).with_value("zero"),
                ResidualStatus::Nonzero { witness } => CheckResult::new(name, false)
                    .with_value(format!("nonzero ({} terms)", check.residual_terms))
                    .with_witness(witness.clone()),
                ResidualStatus::Failed(msg) => CheckResult::new(name, false).with_value("error").with_witness(msg.clone()),
            });
        }
    }
    Ok(rows)
}

fn load_solution(ctx: &mut Context, src: &SolutionSource) -> Result<ClosedFormSolution, UsageError> {
    match &src.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            let sol = parse_solution(&parse_config(&text)?)?;
            if let Some(n) = src.n {
                if n != sol.n {
                    return Err(UsageError(format!("--n {n} disagrees with n = {} in {}", sol.n, path.display())));
                }
            }
            ctx.input("params", path.display());
            record_solution(ctx, &sol);
            Ok(sol)
        }
        None => {
            let n = check_n(ctx.pick("n", src.n, 2)?)?;
            let sol = make_solution(n, vec![GaussianRational::zero(); n], GaussianRational::i(), Pairing::MuZ)
                .expect("mu = 0, lambda = i is admissible");
            record_solution(ctx, &sol);
            Ok(sol)
        }
    }
}

fn record_solution(ctx: &mut Context, sol: &ClosedFormSolution) {
    ctx.input("n", sol.n);
    let mu: Vec<String> = sol.mu.iter().map(|m| m.to_string()).collect();
    ctx.input("mu", mu.join(", "));
    ctx.input("lambda", &sol.lambda);
    ctx.input("convention", sol.pairing.name());
}

fn complex_pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn solution_check(ctx: &mut Context, a: &SolutionArgs) -> Result<Vec<CheckResult>, UsageError> {
    let sol = load_solution(ctx, &a.source)?;
    let points = ctx.pick("points", a.points, 100)?;
    let n = sol.n;
    let finding = pairing_finding();
    let mut rows = vec![CheckResult::info("pairing convention", finding.summary())];
    let f = sol.log_function();
    let expr = family_expression(&sol);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let pts: Vec<HPoint> = (0..points).map(|_| HPoint::random(&mut rng, n)).collect();
    let exact: Vec<_> = pts
        .par_iter()
        .map(|p| {
            let j = f.jet_values(p).map_err(|e| e.to_string())?;
            Ok::<_, String>((residual_with(&j, n as i64), tensors_from_jets(&j)))
        })
        .collect();
    let mut residual_row = CheckResult::new("exact residual of the logarithmic equation", true).with_value(points);
    let mut tensor_row = CheckResult::new("exact D, E, G", true).with_value(points);
    for (p, r) in pts.iter().zip(&exact) {
        let at = format_point(p);
        match r {
            Err(e) => {
                residual_row = CheckResult::new(residual_row.name, false).with_witness(format!("{at}: {e}"));
                break;
            }
            Ok((res, t)) => {
                if !res.is_zero() && residual_row.witness.is_none() {
                    residual_row = CheckResult::new(residual_row.name.clone(), false).with_witness(format!("{at}: residual {res}"));
                }
                if !t.all_zero() && tensor_row.witness.is_none() {
                    tensor_row = CheckResult::new(tensor_row.name.clone(), false)
                        .with_witness(format!("{at}: max |entry| {:e}", t.max_abs()));
                }
            }
        }
    }
    rows.push(residual_row);
    rows.push(tensor_row);
    let tol = 1e-9;
    let numeric: Vec<Result<(f64, f64), String>> = pts
        .par_iter()
        .map(|p| {
            let rp = RealPoint::from_hpoint(p);
            let tv = taylor_eval(&expr, &rp).map_err(|e| e.to_string())?;
            let r = residual_from_jets(&cr_jets_from_taylor(&tv, &rp));
            Ok((r.residual.norm(), r.max_tensor()))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64);
    let mut err = None;
    for r in numeric {
        match r {
            Ok((a, b)) => worst = (worst.0.max(a), worst.1.max(b)),
            Err(e) => err = err.or(Some(e)),
        }
    }
    let mut row = CheckResult::new("numeric residual and tensors", err.is_none() && worst.0 <= tol && worst.1 <= tol)
        .with_value(serde_json::json!({"residual": worst.0, "tensors": worst.1}))
        .with_tolerance(tol);
    if let Some(e) = err {
        row = row.with_witness(e);
    }
    rows.push(row);
    if n >= 2 {
        let decay = pointwise_decay_check(&sol, 200, ctx.seed);
        rows.push(CheckResult::new("decay constant sup u (|z|^2+|t|)^((n-2)/2)", decay.sup.is_finite()).with_value(decay.sup));
    }
    Ok(rows)
}

fn format_point(p: &HPoint) -> String {
    let z: Vec<String> = p.z.iter().map(|c| c.to_string()).collect();
    format!("z = ({}), t = {}", z.join(", "), p.t)
}

fn series_spec(ctx: &mut Context, s: &SeriesArgs) -> Result<GrowthSpec, UsageError> {
    let mut spec = GrowthSpec::standard(ctx.seed);
    spec.samples = ctx.pick("samples", s.samples, spec.samples)?;
    spec.tolerance = ctx.pick("tolerance", s.tolerance, spec.tolerance)?;
    let default_grid = spec.grid.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
    let grid: String = ctx.pick("grid", s.grid.clone(), default_grid)?;
    spec.grid = grid
        .split(',')
        .map(|r| match r.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(UsageError(format!("grid entry `{r}` is not a positive radius"))),
        })
        .collect::<Result<_, _>>()?;
    if spec.grid.len() < 2 {
        return Err(UsageError("grid needs at least two radii".into()));
    }
    if spec.samples < 2 {
        return Err(UsageError("samples must be at least 2".into()));
    }
    Ok(spec)
}

fn growth_rows(report: &GrowthReport, csv: &Option<std::path::PathBuf>) -> Result<Vec<CheckResult>, UsageError> {
    if let Some(path) = csv {
        std::fs::write(path, report.csv()).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(vec![
        CheckResult::new(format!("slope of log int {} <= {}", report.integrand, report.bound), report.passed)
            .with_value(report.slope)
            .with_tolerance(report.tolerance),
        CheckResult::info("tail slope", report.tail_slope),
        CheckResult::info("series", &report.points),
        CheckResult::info("workers", report.workers),
    ])
}

pub fn growth(ctx: &mut Context, a: &GrowthArgs) -> Result<Vec<CheckResult>, UsageError> {
    let sol = load_solution(ctx, &a.source)?;
    ctx.input("q", a.q);
    ctx.input("r", a.r);
    let spec = series_spec(ctx, &a.series)?;
    let report = growth_exponent(&sol, a.q, a.r, &spec)?;
    growth_rows(&report, &a.series.csv)
}

pub fn integral_check(ctx: &mut Context, a: &IntegralArgs) -> Result<Vec<CheckResult>, UsageError> {
    let sol = load_solution(ctx, &a.source)?;
    ctx.input("q", a.q);
    let spec = series_spec(ctx, &a.series)?;
    let (hyp, report) = check_integral_hypotheses(&sol, a.q, &spec)?;
    let mut rows = vec![CheckResult::info("hypothesis", hyp)];
    rows.extend(growth_rows(&report, &a.series.csv)?);
    Ok(rows)
}

pub fn coeffs(ctx: &mut Context, a: &crate::CoeffsArgs) -> Result<Vec<CheckResult>, UsageError> {
    let samples = ctx.pick("samples", a.samples, 100_000)?;
    let m_text: String = ctx.pick("m-max", a.m_max.clone(), "99/100".to_string())?;
    let m_max: BigRational = parse_rational(&m_text)?;
    let report = coefficient_bounds_check(ctx.seed, samples, &m_max);
    let names = ["c1 >= 3(1-m)", "c4 >= (5-3m)/3", "c6 >= (3-2m)/(5-3m)"];
    let mut rows: Vec<CheckResult> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            CheckResult::new(*name, report.violations[k] == 0)
                .with_value(serde_json::json!({"violations": report.violations[k], "min_slack": report.min_slack[k]}))
        })
        .collect();
    rows.push(CheckResult::info("max |c2|+|c3|+|c5| by m slice", &report.max_abs_sum_by_slice));
    Ok(rows)
}

pub fn eval(ctx: &mut Context, a: &crate::EvalArgs) -> Result<Vec<CheckResult>, UsageError> {
    let expr = parse_expression(&a.expr)?;
    ctx.input("expr", &a.expr);
    ctx.input("at", &a.at);
    let n = check_n(ctx.pick("n", a.n, expr.max_index().max(1))?)?;
    expr.check_dimension(n)?;
    let p = RealPoint::from_hpoint(&parse_point(&a.at, n).map_err(UsageError)?);
    let tv = match taylor_eval(&expr, &p) {
        Ok(tv) => tv,
        Err(e) => return Ok(vec![CheckResult::new("evaluation", false).with_witness(e.to_string())]),
    };
    let jets = cr_jets_from_taylor(&tv, &p);
    let res = residual_from_jets(&jets);
    let mut table = BTreeMap::new();
    for len in 1..=3 {
        for w in canonical_words(n, len) {
            table.insert(format!("f_{}", word_to_string(&w)), complex_pair(jets.values[&w]));
        }
    }
    let mut rows = vec![
        CheckResult::info("f", complex_pair(jets.f)),
        CheckResult::info("e^(2f)", complex_pair(jets.e2f)),
        CheckResult::info("residual of the logarithmic equation", complex_pair(res.residual)),
        CheckResult::info("max |D|, |E|, |G| entry", res.max_tensor()),
        CheckResult::info("jets", table),
    ];
    match fd_crosscheck(&expr, &p, FdSteps::default()) {
        Ok(fd) => rows.push(CheckResult::info("finite-difference deviation", fd.max_deviation)),
        Err(e) => rows.push(CheckResult::info("finite-difference deviation", e.to_string())),
    }
    Ok(rows)
}
