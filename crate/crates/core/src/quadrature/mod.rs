//! Monte Carlo integration over Korányi balls `{(|z|⁴ + t²)^{1/4} < R}` and growth
//! exponents of `R ↦ ∫_{B_R}`.

pub mod growth;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::HPoint;

pub use growth::{
    check_integral_hypotheses, fit_slope, growth_exponent, GrowthPoint, GrowthReport, GrowthSpec, Hypothesis,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("non-finite integrand value {value} at z = {z:?}, t = {t}")]
    NonFinite { value: f64, z: Vec<(f64, f64)>, t: f64 },
    #[error("parameter out of range: {0}")]
    Range(String),
}

/// `ρ(z, t) = (|z|⁴ + t²)^{1/4}`
pub fn gauge(z: &[Complex64], t: f64) -> f64 {
    let zz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    (zz * zz + t * t).sqrt().sqrt()
}

/// `ρ⁴ = |z|⁴ + t²`, exact.
pub fn gauge4_exact(p: &HPoint) -> BigRational {
    let zz = p.z_sq();
    &zz * &zz + &p.t * &p.t
}

/// `δ_s(z, t) = (s z, s² t)`
#[derive(Clone, Debug, PartialEq)]
pub struct Dilation {
    pub s: BigRational,
}

impl Dilation {
    pub fn apply(&self, p: &HPoint) -> HPoint {
        let s = crate::algebra::GaussianRational::from_real(self.s.clone());
        HPoint { z: p.z.iter().map(|x| x * &s).collect(), t: &p.t * &self.s * &self.s }
    }

    pub fn apply_f64(s: f64, z: &[Complex64], t: f64) -> (Vec<Complex64>, f64) {
        (z.iter().map(|x| x * s).collect(), t * s * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KoranyiBall {
    pub n: usize,
    pub radius: f64,
}

impl KoranyiBall {
    pub fn new(n: usize, radius: f64) -> Result<Self, QuadratureError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(QuadratureError::BadRadius(radius));
        }
        Ok(KoranyiBall { n, radius })
    }

    pub fn contains(&self, z: &[Complex64], t: f64) -> bool {
        let zz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        let r2 = self.radius * self.radius;
        zz * zz + t * t < r2 * r2
    }

    /// `(2R)^{2n} · 2R²`
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.radius).powi(2 * self.n as i32) * 2.0 * self.radius * self.radius
    }

    /// `R^{2n+2} · |S^{2n−1}| · ½ B(n/2, 3/2)`
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.n) * self.radius.powi(2 * self.n as i32 + 2)
    }

    fn draw(&self, rng: &mut impl Rng, z: &mut [Complex64]) -> f64 {
        let r = self.radius;
        for x in z.iter_mut() {
            *x = Complex64::new(rng.random_range(-r..r), rng.random_range(-r..r));
        }
        rng.random_range(-r * r..r * r)
    }
}

/// `Γ(k/2)`
fn gamma_half(k: u32) -> f64 {
    match k {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Analytic volume of the unit Korányi ball in `H^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let n32 = n as u32;
    let sphere = 2.0 * std::f64::consts::PI.powi(n as i32) / gamma_half(2 * n32);
    let beta = gamma_half(n32) * gamma_half(3) / gamma_half(n32 + 3);
    sphere * 0.5 * beta
}

/// A point of `{ρ = rho}`: a random box point rescaled by a dilation.
pub fn random_point_on_gauge_sphere(rng: &mut impl Rng, n: usize, rho: f64) -> (Vec<Complex64>, f64) {
    loop {
        let z: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let t = rng.random_range(-1.0..1.0);
        let r = gauge(&z, t);
        if r > 1e-3 {
            return Dilation::apply_f64(rho / r, &z, t);
        }
    }
}

fn stream_rng(seed: u64, radius: f64, stratum: usize, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ radius.to_bits().rotate_left(17));
    rng.set_stream(((stratum as u64) << 40) | chunk as u64);
    rng
}

/// Uniform samples of `B_R` by rejection from the box `|Re z_α|, |Im z_α| ≤ R`, `|t| ≤ R²`.
pub struct BallSampler {
    ball: KoranyiBall,
    rng: ChaCha8Rng,
    remaining: usize,
    pub drawn: u64,
    pub accepted: u64,
}

impl BallSampler {
    pub fn acceptance(&self) -> f64 {
        self.accepted as f64 / self.drawn.max(1) as f64
    }
}

impl Iterator for BallSampler {
    /// `(z, t, weight)` with weight `vol(box) · accepted / drawn` tracked at the end.
    type Item = (Vec<Complex64>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        let mut z = vec![Complex64::new(0.0, 0.0); self.ball.n];
        loop {
            let t = self.ball.draw(&mut self.rng, &mut z);
            self.drawn += 1;
            if self.ball.contains(&z, t) {
                self.accepted += 1;
                self.remaining -= 1;
                return Some((z, t));
            }
        }
    }
}

/// `count` accepted samples of `B_R`; identical for identical seeds. The volume
/// estimate is `box_volume · acceptance`.
pub fn sample_ball(n: usize, radius: f64, count: usize, seed: u64) -> Result<BallSampler, QuadratureError> {
    if count == 0 {
        return Err(QuadratureError::NoSamples);
    }
    let ball = KoranyiBall::new(n, radius)?;
    Ok(BallSampler { ball, rng: stream_rng(seed, radius, 0, 0), remaining: count, drawn: 0, accepted: 0 })
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub strata: usize,
    pub workers: usize,
    /// Radius of the excluded ball around the origin, if any.
    pub excluded_radius: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegrateOptions {
    /// Split `B_R` into dyadic shells `B_{R 2^{-k}} \ B_{R 2^{-k-1}}` down to this radius.
    pub stratify_down_to: Option<f64>,
    /// Integrate over `B_R \ B_ε` instead of `B_R`.
    pub exclude_radius: Option<f64>,
}

const CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: Neumaier,
    sum_sq: Neumaier,
}

/// One stratum `{r_in ≤ ρ < r_out}` estimated from box draws of `B_{r_out}`.
fn stratum_estimate<F>(
    n: usize,
    r_in: f64,
    r_out: f64,
    draws: usize,
    seed: u64,
    radius_tag: f64,
    stratum: usize,
    integrand: &F,
) -> Result<(f64, f64), QuadratureError>
where
    F: Fn(&[Complex64], f64) -> f64 + Sync,
{
    let outer = KoranyiBall { n, radius: r_out };
    let chunks = draws.div_ceil(CHUNK);
    let parts: Vec<Result<Moments, QuadratureError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, radius_tag, stratum, c);
            let count = CHUNK.min(draws - c * CHUNK);
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            let mut m = Moments::default();
            for _ in 0..count {
                let t = outer.draw(&mut rng, &mut z);
                let rho = gauge(&z, t);
                if rho >= r_out || rho < r_in {
                    continue;
                }
                let v = integrand(&z, t);
                if !v.is_finite() {
                    return Err(QuadratureError::NonFinite {
                        value: v,
                        z: z.iter().map(|x| (x.re, x.im)).collect(),
                        t,
                    });
                }
                m.sum.add(v);
                m.sum_sq.add(v * v);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        let p = p?;
        total.sum.merge(&p.sum);
        total.sum_sq.merge(&p.sum_sq);
    }
    let vol = outer.box_volume();
    let k = draws as f64;
    let mean = total.sum.value() / k;
    let var = (total.sum_sq.value() / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
    Ok((vol * mean, vol * (var / k).sqrt()))
}

/// `∫_{B_R} F` by Monte Carlo with `samples` box draws in total.
pub fn integrate<F>(
    integrand: F,
    n: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    opts: IntegrateOptions,
) -> Result<QuadratureEstimate, QuadratureError>
where
    F: Fn(&[Complex64], f64) -> f64 + Sync,
{
    if samples == 0 {
        return Err(QuadratureError::NoSamples);
    }
    KoranyiBall::new(n, radius)?;
    let floor = opts.exclude_radius.unwrap_or(0.0);
    if floor >= radius {
        return Err(QuadratureError::Range(format!("excluded radius {floor} not below R = {radius}")));
    }
    let mut edges = vec![radius];
    if let Some(stop) = opts.stratify_down_to {
        while *edges.last().unwrap() / 2.0 >= stop.max(floor) && edges.len() < 64 {
            let next = edges.last().unwrap() / 2.0;
            edges.push(next);
        }
    }
    edges.push(floor);
    let strata = edges.len() - 1;
    let per = (samples / strata).max(2);
    let mut value = Neumaier::default();
    let mut var = Neumaier::default();
    for k in 0..strata {
        let (v, e) = stratum_estimate(n, edges[k + 1], edges[k], per, seed, radius, k, &integrand)?;
        value.add(v);
        var.add(e * e);
    }
    Ok(QuadratureEstimate {
        value: value.value(),
        stderr: var.value().sqrt(),
        samples: per * strata,
        seed,
        strata,
        workers: rayon::current_num_threads(),
        excluded_radius: opts.exclude_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_volumes() {
        assert!((unit_ball_volume(1) - PI * PI / 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - 2.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sampler_is_deterministic_and_inside() {
        let a: Vec<_> = sample_ball(2, 1.5, 200, 9).unwrap().collect();
        let b: Vec<_> = sample_ball(2, 1.5, 200, 9).unwrap().collect();
        assert_eq!(a, b);
        let ball = KoranyiBall::new(2, 1.5).unwrap();
        assert!(a.iter().all(|(z, t)| ball.contains(z, *t)));
    }

    #[test]
    fn neumaier_beats_naive() {
        let mut s = Neumaier::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
