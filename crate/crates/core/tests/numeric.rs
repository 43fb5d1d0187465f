use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crlab::algebra::{rat, GaussianRational};
use crlab::closed_form::{make_solution, ClosedFormSolution, HPoint, Pairing};
use crlab::jets::canonical_words;
use crlab::numeric::*;
use crlab::syntax::parse_expression;

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> RealPoint {
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    RealPoint::new(&x, &y, rng.random_range(-2.0..2.0))
}

#[test]
fn taylor_jets_match_exact_jets_on_the_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=2 {
        let sol = ClosedFormSolution::random(&mut rng, n, Pairing::MuZ);
        let expr = family_expression(&sol);
        let exact = sol.log_function();
        for _ in 0..10 {
            let hp = HPoint::random(&mut rng, n);
            let p = RealPoint::from_hpoint(&hp);
            let ad = cr_jets_from_taylor(&taylor_eval(&expr, &p).unwrap(), &p);
            let ex = exact.jet_values(&hp).unwrap();
            for len in 1..=3 {
                for w in canonical_words(n, len) {
                    let (a, b) = (ad.get(&w), ex.get(&w).to_complex());
                    assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "{w:?}: {a} vs {b}");
                }
            }
            assert!((ad.e2f - ex.e2f.to_complex()).norm() <= 1e-12 * ad.e2f.norm().max(1.0));
        }
    }
}

#[test]
fn family_residual_is_numerically_zero() {
    let sol = make_solution(2, vec![GaussianRational::zero(); 2], GaussianRational::i(), Pairing::MuZ).unwrap();
    let expr = family_expression(&sol);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let r = numeric_residual(&expr, &random_point(&mut rng, 2)).unwrap();
        assert!(r.residual.norm() <= 1e-9 && r.max_tensor() <= 1e-9, "{:?}", r.residual);
    }
}

#[test]
fn perturbed_solution_is_detected() {
    let sol = make_solution(1, vec![GaussianRational::zero()], GaussianRational::i(), Pairing::MuZ).unwrap();
    let f = family_expression(&sol);
    let bump = parse_expression("1/1000*(x1^2 + y1^2)*exp(-(x1^2 + y1^2))").unwrap();
    let perturbed = f + bump;
    let r = numeric_residual(&perturbed, &RealPoint::new(&[0.4], &[0.3], 0.2)).unwrap();
    assert!(r.residual.norm() > 1e-5, "{}", r.residual);
}

#[test]
fn finite_differences_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let poly = parse_expression("x1^3 - 2*x1*y2*t + y1^2*t + 1/3*x2^2*y1 - t^3").unwrap();
    let composite = parse_expression("exp(2*t/(1 + x1^2 + y1^2)) + log(2 + x2^2 + t^2)*y2").unwrap();
    for _ in 0..10 {
        let p = random_point(&mut rng, 2);
        let r = fd_crosscheck(&poly, &p, FdSteps::polynomial()).unwrap();
        assert!(r.max_deviation <= 1e-9, "{} at {}", r.max_deviation, r.worst);
        let r = fd_crosscheck(&composite, &p, FdSteps::default()).unwrap();
        assert!(r.max_deviation <= 1e-6, "{} at {}", r.max_deviation, r.worst);
    }
}

#[test]
fn commutator_and_conjugation_on_random_smooth_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let exprs = [
        "exp(x1*y2 - t^2) + sqrt(3 + x2^2)*y1",
        "log(1 + x1^2 + y1^2 + t^2)*(x2 - t)",
        "(x1 + 2*y1)^3/(4 + y2^2) + t*x2",
    ];
    for s in exprs {
        let e = parse_expression(s).unwrap();
        for _ in 0..10 {
            let p = random_point(&mut rng, 2);
            let (j, direct) = cr_jets_with_words(&taylor_eval(&e, &p).unwrap(), &p);
            assert!(j.commutator_defect(&direct) <= 1e-9, "{s}");
            for a in 1..=2 {
                let (fa, fab) = (j.get(&[crlab::jets::IndexLetter::Holo(a)]), j.get(&[crlab::jets::IndexLetter::Anti(a)]));
                assert!((fa.conj() - fab).norm() <= 1e-12 * fa.norm().max(1.0));
            }
        }
    }
}

#[test]
fn dimension_and_domain_errors() {
    let p = RealPoint::new(&[1.0], &[0.0], 0.0);
    assert!(matches!(taylor_eval(&parse_expression("x2").unwrap(), &p), Err(NumericError::Dimension { .. })));
    assert!(matches!(taylor_eval(&parse_expression("sqrt(-1 - t)").unwrap(), &p), Err(NumericError::Domain { .. })));
    let _ = rat(1, 1);
}
