//! The explicit family `u = N^{n/2} / |w|^n` with `w = t + i|z|² + ⟨μ, z⟩ + λ` and
//! `N = 4 Im λ − |μ|²`.

pub mod logjets;

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{rat, rat_int, rational::rat_to_f64, Expr, GaussianRational, ParamPoly};
use crate::jets::IndexLetter;

pub use logjets::{Coordinates, JetValues, LogFunction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClosedFormError {
    #[error("invalid parameters: need |mu|^2 < 4 Im lambda, got |mu|^2 = {mu_sq}, 4 Im lambda = {four_im}")]
    InvalidParameters { mu_sq: String, four_im: String },
    #[error("mu has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("w vanishes at the requested point")]
    SingularPoint,
    #[error("e^(2f) needs integer weights")]
    NonIntegralWeight,
    #[error("internal error: {0}")]
    Internal(&'static str),
}

/// How `⟨μ, z⟩` pairs the parameter with the coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// `Σ μ_α z_α`
    MuZ,
    /// `Σ μ_α z̄_α`
    MuZbar,
}

impl Pairing {
    pub fn name(self) -> &'static str {
        match self {
            Pairing::MuZ => "mu.z",
            Pairing::MuZbar => "mu.zbar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mu.z" => Some(Pairing::MuZ),
            "mu.zbar" => Some(Pairing::MuZbar),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    pub z: Vec<GaussianRational>,
    pub t: BigRational,
}

impl HPoint {
    pub fn origin(n: usize) -> Self {
        HPoint { z: vec![GaussianRational::zero(); n], t: BigRational::zero() }
    }

    pub fn z_sq(&self) -> BigRational {
        self.z.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn to_f64(&self) -> (Vec<num_complex::Complex64>, f64) {
        (self.z.iter().map(|x| x.to_complex()).collect(), rat_to_f64(&self.t))
    }

    /// A random point with small rational coordinates.
    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        let mut r = || rat(rng.random_range(-30..=30), rng.random_range(1..=10));
        let z = (0..n).map(|_| GaussianRational::new(r(), r())).collect();
        HPoint { z, t: r() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormSolution {
    pub n: usize,
    pub mu: Vec<GaussianRational>,
    pub lambda: GaussianRational,
    pub pairing: Pairing,
    /// `4 Im λ − |μ|² > 0`
    pub big_n: BigRational,
}

pub fn make_solution(
    n: usize,
    mu: Vec<GaussianRational>,
    lambda: GaussianRational,
    pairing: Pairing,
) -> Result<ClosedFormSolution, ClosedFormError> {
    if mu.len() != n {
        return Err(ClosedFormError::DimensionMismatch { expected: n, got: mu.len() });
    }
    let mu_sq: BigRational = mu.iter().map(|x| x.norm_sqr()).sum();
    let four_im = rat_int(4) * &lambda.im;
    let big_n = &four_im - &mu_sq;
    if !big_n.is_positive() {
        return Err(ClosedFormError::InvalidParameters { mu_sq: mu_sq.to_string(), four_im: four_im.to_string() });
    }
    Ok(ClosedFormSolution { n, mu, lambda, pairing, big_n })
}

impl ClosedFormSolution {
    /// A random valid instance with `μ ≠ 0` in general.
    pub fn random(rng: &mut impl Rng, n: usize, pairing: Pairing) -> Self {
        loop {
            let mut r = |k: i64| rat(rng.random_range(-k..=k), rng.random_range(1..=6));
            let mu: Vec<_> = (0..n).map(|_| GaussianRational::new(r(6), r(6))).collect();
            let lambda = GaussianRational::new(r(10), r(20).abs() + rat(1, 7));
            if let Ok(sol) = make_solution(n, mu, lambda, pairing) {
                return sol;
            }
        }
    }

    fn pairing_value(&self, z: &[GaussianRational]) -> GaussianRational {
        let mut out = GaussianRational::zero();
        for (m, x) in self.mu.iter().zip(z) {
            let x = match self.pairing {
                Pairing::MuZ => x.clone(),
                Pairing::MuZbar => x.conj(),
            };
            out += &(m * &x);
        }
        out
    }

    /// `w = t + i|z|² + ⟨μ, z⟩ + λ`
    pub fn eval_w(&self, p: &HPoint) -> GaussianRational {
        let base = GaussianRational::new(p.t.clone(), p.z_sq());
        &(&base + &self.pairing_value(&p.z)) + &self.lambda
    }

    /// `u² = N^n / |w|^{2n}`
    pub fn eval_u_squared(&self, p: &HPoint) -> Result<BigRational, ClosedFormError> {
        let w2 = self.eval_w(p).norm_sqr();
        if w2.is_zero() {
            return Err(ClosedFormError::SingularPoint);
        }
        Ok(num_traits::pow(self.big_n.clone(), self.n) / num_traits::pow(w2, self.n))
    }

    pub fn eval_u(&self, p: &HPoint) -> Result<f64, ClosedFormError> {
        Ok(rat_to_f64(&self.eval_u_squared(p)?).sqrt())
    }

    /// Floating evaluation of `u = (N / |w|²)^{n/2}` at real coordinates.
    pub fn eval_u_f64(&self, z: &[num_complex::Complex64], t: f64) -> f64 {
        (rat_to_f64(&self.big_n) / self.w_f64(z, t).norm_sqr()).powf(self.n as f64 / 2.0)
    }

    pub fn w_f64(&self, z: &[num_complex::Complex64], t: f64) -> num_complex::Complex64 {
        let mut w = num_complex::Complex64::new(t, z.iter().map(|x| x.norm_sqr()).sum());
        for (m, x) in self.mu.iter().zip(z) {
            let x = match self.pairing {
                Pairing::MuZ => *x,
                Pairing::MuZbar => x.conj(),
            };
            w += m.to_complex() * x;
        }
        w + self.lambda.to_complex()
    }

    /// `e^{2f} = N / (4|w|²)`
    pub fn e2f_f64(&self, z: &[num_complex::Complex64], t: f64) -> f64 {
        rat_to_f64(&self.big_n) / (4.0 * self.w_f64(z, t).norm_sqr())
    }

    /// `|∂f|² = Σ |f_α|²` with `f_α = −½ (Z_α w / w + Z_α w̄ / w̄)`.
    pub fn grad_sq_f64(&self, z: &[num_complex::Complex64], t: f64) -> f64 {
        let w = self.w_f64(z, t);
        let i = num_complex::Complex64::i();
        let mut out = 0.0;
        for (m, x) in self.mu.iter().zip(z) {
            let m = m.to_complex();
            let fa = match self.pairing {
                Pairing::MuZ => -0.5 * (2.0 * i * x.conj() + m) / w,
                Pairing::MuZbar => -0.5 * (2.0 * i * x.conj() / w + m.conj() / w.conj()),
            };
            out += fa.norm_sqr();
        }
        out
    }

    /// `f = ½ ln N − ½ ln w − ½ ln w̄ − ln 2`, as a log-polynomial function.
    pub fn log_function(&self) -> LogFunction {
        let coords = Coordinates::new(self.n);
        let i = ParamPoly::i();
        let mut w = coords.t().add(&coords.z_sq().scale(&i)).add(&Expr::scalar(self.lambda.clone()));
        let mut wb = coords.t().sub(&coords.z_sq().scale(&i)).add(&Expr::scalar(self.lambda.conj()));
        for a in 0..self.n {
            let (mu, mub) = (ParamPoly::constant(self.mu[a].clone()), ParamPoly::constant(self.mu[a].conj()));
            match self.pairing {
                Pairing::MuZ => {
                    w.add_assign_ref(&coords.z(a).scale(&mu));
                    wb.add_assign_ref(&coords.zb(a).scale(&mub));
                }
                Pairing::MuZbar => {
                    w.add_assign_ref(&coords.zb(a).scale(&mu));
                    wb.add_assign_ref(&coords.z(a).scale(&mub));
                }
            }
        }
        let half = rat(-1, 2);
        let e2c = GaussianRational::from_real(&self.big_n / rat_int(4));
        LogFunction::new(coords, vec![(half.clone(), "w", w), (half, "wb", wb)], e2c)
    }
}

/// `f = −ln(1 + |z|² + t²)`: smooth and real but not in the family.
pub fn non_member_mock(n: usize) -> LogFunction {
    let coords = Coordinates::new(n);
    let q = Expr::one().add(&coords.z_sq()).add(&coords.t().mul(&coords.t()));
    LogFunction::new(coords, vec![(rat(-1, 1), "q", q)], GaussianRational::one())
}

/// `Δ_b f − n|∂f|² − k e^{2f}` with `Δ_b f = −Re Σ f_{αᾱ}`; the equation has `k = n`.
pub fn residual_with(j: &JetValues, k: i64) -> GaussianRational {
    let n = j.n;
    let mut trace = GaussianRational::zero();
    for a in 1..=n as u8 {
        trace += &j.get(&[IndexLetter::Holo(a), IndexLetter::Anti(a)]);
    }
    let lap = GaussianRational::from_real(-trace.re.clone());
    let nn = GaussianRational::int(n as i64);
    &(&lap - &(&nn * &j.grad_sq())) - &(&GaussianRational::int(k) * &j.e2f)
}

pub fn residual_log_equation(f: &LogFunction, p: &HPoint) -> Result<GaussianRational, ClosedFormError> {
    let j = f.jet_values(p)?;
    Ok(residual_with(&j, f.n() as i64))
}

/// `D_{αβ}`, `E_{αβ̄}` and `G_α` at a point.
#[derive(Clone, Debug)]
pub struct Tensors {
    pub d: Vec<Vec<GaussianRational>>,
    pub e: Vec<Vec<GaussianRational>>,
    pub g: Vec<GaussianRational>,
}

impl Tensors {
    pub fn all_zero(&self) -> bool {
        self.d.iter().flatten().chain(self.e.iter().flatten()).chain(&self.g).all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.d
            .iter()
            .flatten()
            .chain(self.e.iter().flatten())
            .chain(&self.g)
            .map(|x| x.to_complex().norm())
            .fold(0.0, f64::max)
    }
}

pub fn tensors_from_jets(j: &JetValues) -> Tensors {
    use IndexLetter::{Anti, Holo, T};
    let n = j.n;
    let idx = |a: usize| a as u8 + 1;
    let mut trace = GaussianRational::zero();
    for a in 0..n {
        trace += &j.get(&[Holo(idx(a)), Anti(idx(a))]);
    }
    let trace_part = trace.scale(&rat(1, n as i64));
    let two = GaussianRational::int(2);
    let g = j.g();
    let mut d = vec![vec![GaussianRational::zero(); n]; n];
    let mut e = vec![vec![GaussianRational::zero(); n]; n];
    let mut gv = Vec::with_capacity(n);
    for a in 0..n {
        let fa = j.get(&[Holo(idx(a))]);
        for b in 0..n {
            let fb = j.get(&[Holo(idx(b))]);
            d[a][b] = &j.get(&[Holo(idx(a)), Holo(idx(b))]) - &(&two * &(&fa * &fb));
            let mut x = j.get(&[Holo(idx(a)), Anti(idx(b))]);
            if a == b {
                x -= &trace_part;
            }
            e[a][b] = x;
        }
        gv.push(&j.get(&[Holo(idx(a)), T]).mul_i() + &(&g * &fa));
    }
    Tensors { d, e, g: gv }
}

pub fn tensors_at(f: &LogFunction, p: &HPoint) -> Result<Tensors, ClosedFormError> {
    Ok(tensors_from_jets(&f.jet_values(p)?))
}

/// Which pairing makes the residual vanish on random instances with `μ ≠ 0`.
#[derive(Clone, Debug)]
pub struct PairingFinding {
    pub chosen: Option<Pairing>,
    pub mu_z_zero: bool,
    pub mu_zbar_zero: bool,
    pub instances: usize,
    pub points: usize,
}

impl PairingFinding {
    pub fn summary(&self) -> String {
        format!(
            "pairing {}: mu.z residual zero = {}, mu.zbar residual zero = {} ({} instances x {} points)",
            self.chosen.map_or("undetermined", Pairing::name),
            self.mu_z_zero,
            self.mu_zbar_zero,
            self.instances,
            self.points
        )
    }
}

fn residual_vanishes(pairing: Pairing, seed: u64, instances: usize, points: usize, n: usize) -> bool {
    (0..instances).into_par_iter().all(|k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let sol = ClosedFormSolution::random(&mut rng, n, pairing);
        let f = sol.log_function();
        (0..points).all(|_| {
            let p = HPoint::random(&mut rng, n);
            matches!(residual_log_equation(&f, &p), Ok(r) if r.is_zero())
        })
    })
}

pub fn determine_pairing(seed: u64, instances: usize, points: usize) -> PairingFinding {
    let mu_z_zero = residual_vanishes(Pairing::MuZ, seed, instances, points, 2);
    let mu_zbar_zero = residual_vanishes(Pairing::MuZbar, seed, instances, points, 2);
    let chosen = match (mu_z_zero, mu_zbar_zero) {
        (true, false) => Some(Pairing::MuZ),
        (false, true) => Some(Pairing::MuZbar),
        _ => None,
    };
    PairingFinding { chosen, mu_z_zero, mu_zbar_zero, instances, points }
}

static PAIRING: OnceLock<PairingFinding> = OnceLock::new();

/// The empirically determined pairing, computed once per process.
pub fn pairing_finding() -> &'static PairingFinding {
    PAIRING.get_or_init(|| determine_pairing(0x5eed, 4, 5))
}

pub fn default_pairing() -> Pairing {
    pairing_finding().chosen.unwrap_or(Pairing::MuZ)
}

/// `sup u · (|z|² + |t|)^{(n−2)/2}` over random points of the dyadic Korányi shells
/// `2^k ≤ ρ < 2^{k+1}`, `k = −4..10`. The origin is excluded.
pub fn pointwise_decay_check(sol: &ClosedFormSolution, samples_per_shell: usize, seed: u64) -> DecayReport {
    let n = sol.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_shell = Vec::new();
    for k in -4..10 {
        let mut best: f64 = 0.0;
        for _ in 0..samples_per_shell {
            let rho: f64 = 2f64.powi(k) * rng.random_range(1.0..2.0);
            let (z, t) = crate::quadrature::random_point_on_gauge_sphere(&mut rng, n, rho);
            let zz: f64 = z.iter().map(|x| x.norm_sqr()).sum();
            let u = sol.eval_u_f64(&z, t);
            best = best.max(u * (zz + t.abs()).powf((n as f64 - 2.0) / 2.0));
        }
        per_shell.push((k, best));
    }
    let sup = per_shell.iter().map(|x| x.1).fold(0.0, f64::max);
    DecayReport { sup, per_shell }
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub sup: f64,
    /// `(k, max over shell k)`
    pub per_shell: Vec<(i32, f64)>,
}
