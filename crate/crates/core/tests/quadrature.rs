use num_complex::Complex64;

use crlab::algebra::GaussianRational;
use crlab::closed_form::{make_solution, ClosedFormSolution, Pairing};
use crlab::quadrature::*;

fn extremal() -> ClosedFormSolution {
    make_solution(2, vec![GaussianRational::zero(); 2], GaussianRational::i(), Pairing::MuZ).unwrap()
}

fn one(_: &[Complex64], _: f64) -> f64 {
    1.0
}

#[test]
fn constant_integrand_gives_the_volume() {
    for n in 1..=2 {
        for r in [1.0, 2.0] {
            let est = integrate(one, n, r, 400_000, 3, IntegrateOptions::default()).unwrap();
            let exact = KoranyiBall::new(n, r).unwrap().volume();
            assert!((est.value - exact).abs() <= 3.0 * est.stderr, "n = {n}, R = {r}: {} vs {exact}", est.value);
        }
    }
}

#[test]
fn odd_integrand_vanishes() {
    let est = integrate(|_, t| t, 2, 1.5, 400_000, 4, IntegrateOptions::default()).unwrap();
    assert!(est.value.abs() <= 3.0 * est.stderr);
}

#[test]
fn acceptance_ratio_matches_the_volume_ratio() {
    let mut s = sample_ball(1, 1.0, 4_000_000, 10).unwrap();
    for (z, t) in s.by_ref() {
        assert!(KoranyiBall::new(1, 1.0).unwrap().contains(&z, t));
    }
    let expected = unit_ball_volume(1) / KoranyiBall::new(1, 1.0).unwrap().box_volume();
    let got = s.acceptance();
    assert!((got - expected).abs() / expected < 5e-3, "{got} vs {expected}");
}

#[test]
fn volume_scales_with_the_homogeneous_dimension() {
    let opts = IntegrateOptions { stratify_down_to: Some(0.25), exclude_radius: None };
    let base = integrate(one, 2, 1.0, 400_000, 1, opts).unwrap();
    for r in [2.0, 4.0, 8.0] {
        let est = integrate(one, 2, r, 400_000, 1, opts).unwrap();
        let ratio = est.value / base.value;
        let rel = (est.stderr / est.value).hypot(base.stderr / base.value);
        let expected = f64::powi(r, 6);
        assert!((ratio / expected - 1.0).abs() <= 4.0 * rel, "R = {r}: {ratio} vs {expected}");
    }
}

#[test]
fn estimates_are_reproducible() {
    let f = |z: &[Complex64], t: f64| extremal().eval_u_f64(z, t).powi(3);
    let opts = IntegrateOptions { stratify_down_to: Some(0.25), exclude_radius: None };
    let a = integrate(f, 2, 4.0, 100_000, 77, opts).unwrap();
    let b = integrate(f, 2, 4.0, 100_000, 77, opts).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    let c = integrate(f, 2, 4.0, 100_000, 78, opts).unwrap();
    assert_ne!(a.value.to_bits(), c.value.to_bits());
}

#[test]
fn convergent_tail() {
    let sol = extremal();
    let f = |z: &[Complex64], t: f64| sol.eval_u_f64(z, t).powi(3);
    let opts = IntegrateOptions { stratify_down_to: Some(0.25), exclude_radius: None };
    let r2 = integrate(f, 2, 2.0, 400_000, 5, opts).unwrap();
    let r4 = integrate(f, 2, 4.0, 400_000, 5, opts).unwrap();
    let diff = (r4.value - r2.value) / r2.value;
    assert!(diff.abs() < 0.1, "relative growth from R = 2 to 4 is {diff}");
}

#[test]
fn excluded_ball_is_reported() {
    let opts = IntegrateOptions { stratify_down_to: None, exclude_radius: Some(1e-3) };
    let est = integrate(|z, t| 1.0 / gauge(z, t), 1, 1.0, 100_000, 2, opts).unwrap();
    assert_eq!(est.excluded_radius, Some(1e-3));
    assert!(est.value.is_finite());
}

#[test]
fn non_finite_values_are_reported() {
    let err = integrate(|_, t| if t > 0.0 { f64::NAN } else { 0.0 }, 1, 1.0, 1000, 2, IntegrateOptions::default());
    assert!(matches!(err, Err(QuadratureError::NonFinite { .. })));
}

#[test]
fn parameter_ranges() {
    let sol = extremal();
    let spec = GrowthSpec { samples: 1000, ..GrowthSpec::standard(1) };
    assert!(growth_exponent(&sol, 0.0, 2.5, &spec).is_err());
    assert!(growth_exponent(&sol, 4.5, 0.0, &spec).is_err());
    assert!(growth_exponent(&sol, 3.0, 1.0, &spec).is_err());
    assert!(growth_exponent(&sol, 4.0, 0.0, &spec).is_ok());
    assert!(check_integral_hypotheses(&sol, 2.75, &spec).is_ok_and(|(h, _)| h == Hypothesis::Quadratic));
    assert!(check_integral_hypotheses(&sol, 2.25, &spec).is_err());
    assert!(check_integral_hypotheses(&sol, 3.5, &spec).is_err());
}

#[test]
fn growth_csv_header() {
    let spec = GrowthSpec { samples: 2000, grid: vec![1.0, 2.0], ..GrowthSpec::standard(1) };
    let r = growth_exponent(&extremal(), 0.0, 0.0, &spec).unwrap();
    assert!(r.csv().starts_with("R,estimate,stderr\n"));
    assert_eq!(r.csv().lines().count(), 3);
}
