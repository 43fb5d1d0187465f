//! Sampled checks of coefficient lower bounds and of the mixed tensor inequality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{rat, rat_int, GaussianRational};

use super::coeffs::{coefficients_f64, TwistSign};

/// Exact `(c1, c4, c6)` at rational `(m, f_0, s)`; these three are real.
pub fn real_coefficients_exact(m: &BigRational, f0: &BigRational, s: &BigRational) -> [BigRational; 3] {
    let one = BigRational::one();
    let r = |k: i64| rat_int(k);
    let f02 = f0 * f0;
    let h = s * s + &f02;
    let p = &h - m * &f02;
    let q = (r(5) - r(3) * m) * &h - m * (&one + m) * &f02;
    let c1 = r(3) * &p / &h;
    let c4 = ((r(5) - r(3) * m) * &p + r(4) * m * (&one - m) * &f02) / (r(3) * &p);
    let c6 = ((r(3) - r(2) * m) * &h + m * (r(5) - r(6) * m) * &f02) / &q;
    [c1, c4, c6]
}

/// The lower bounds `3(1−m)`, `(5−3m)/3`, `(3−2m)/(5−3m)`.
pub fn coefficient_lower_bounds(m: &BigRational) -> [BigRational; 3] {
    let r = |k: i64| rat_int(k);
    [r(3) * (r(1) - m), (r(5) - r(3) * m) / r(3), (r(3) - r(2) * m) / (r(5) - r(3) * m)]
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub samples: usize,
    /// Violations of the three lower bounds, in the order c1, c4, c6.
    pub violations: [usize; 3],
    /// Smallest observed `c_k − bound_k`, as a float for display.
    pub min_slack: [f64; 3],
    /// Empirical maximum of `|c2| + |c3| + |c5|` for `m` in `[k/10, (k+1)/10)`.
    pub max_abs_sum_by_slice: Vec<(f64, f64)>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.violations.iter().all(|&v| v == 0)
    }
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> BigRational {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(lo * den..=hi * den);
    rat(num, den)
}

/// Exact check of the three lower bounds at random `(m, f_0, s)` with `0 ≤ m ≤ m_max`, `s > 0`.
pub fn coefficient_bounds_check(seed: u64, samples: usize, m_max: &BigRational) -> BoundsReport {
    const CHUNK: usize = 2048;
    let chunks = samples.div_ceil(CHUNK);
    let mmax_f = crate::algebra::rational::rat_to_f64(m_max);
    let parts: Vec<([usize; 3], [f64; 3], Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let mut viol = [0usize; 3];
            let mut slack = [f64::INFINITY; 3];
            let mut slices = vec![0.0f64; 10];
            for _ in 0..CHUNK.min(samples - ci * CHUNK) {
                let den: i64 = rng.random_range(1..=1000);
                let cap = (m_max * BigRational::from_integer(BigInt::from(den))).floor().to_integer();
                let cap: i64 = cap.try_into().unwrap_or(0);
                let m = rat(rng.random_range(0..=cap), den);
                let f0 = random_rational(&mut rng, -10, 10, 1000);
                let mut s = random_rational(&mut rng, 0, 10, 1000);
                if s.is_zero() {
                    s = rat(1, 1000);
                }
                let c = real_coefficients_exact(&m, &f0, &s);
                let b = coefficient_lower_bounds(&m);
                for k in 0..3 {
                    let d = &c[k] - &b[k];
                    if d.is_negative() {
                        viol[k] += 1;
                    }
                    slack[k] = slack[k].min(crate::algebra::rational::rat_to_f64(&d));
                }
                let mf = crate::algebra::rational::rat_to_f64(&m);
                let cf = coefficients_f64(
                    mf,
                    crate::algebra::rational::rat_to_f64(&f0),
                    crate::algebra::rational::rat_to_f64(&s),
                    TwistSign::default(),
                );
                let sum = cf[1].norm() + cf[2].norm() + cf[4].norm();
                let slot = ((mf * 10.0) as usize).min(9);
                slices[slot] = slices[slot].max(sum);
            }
            (viol, slack, slices)
        })
        .collect();
    let mut violations = [0; 3];
    let mut min_slack = [f64::INFINITY; 3];
    let mut slices = vec![0.0f64; 10];
    for (v, s, sl) in parts {
        for k in 0..3 {
            violations[k] += v[k];
            min_slack[k] = min_slack[k].min(s[k]);
        }
        for (a, b) in slices.iter_mut().zip(sl) {
            *a = a.max(b);
        }
    }
    let max_abs_sum_by_slice = slices
        .into_iter()
        .enumerate()
        .filter(|&(k, v)| v > 0.0 && (k as f64) / 10.0 <= mmax_f)
        .map(|(k, v)| (k as f64 / 10.0, v))
        .collect();
    BoundsReport { samples, violations, min_slack, max_abs_sum_by_slice }
}

/// Random data for the tensor identity: `D` symmetric, `E` Hermitian, `f` a vector.
#[derive(Clone, Debug)]
pub struct TensorSample {
    pub d: Vec<Vec<GaussianRational>>,
    pub e: Vec<Vec<GaussianRational>>,
    pub f: Vec<GaussianRational>,
}

fn small_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    let num = |rng: &mut ChaCha8Rng| rat(rng.random_range(-20..=20), rng.random_range(1..=7));
    GaussianRational::new(num(rng), num(rng))
}

impl TensorSample {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let mut d = vec![vec![GaussianRational::zero(); n]; n];
        let mut e = vec![vec![GaussianRational::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let x = small_gaussian(rng);
                d[a][b] = x.clone();
                d[b][a] = x;
                let y = small_gaussian(rng);
                if a == b {
                    e[a][a] = GaussianRational::from_real(y.re);
                } else {
                    e[b][a] = y.conj();
                    e[a][b] = y;
                }
            }
        }
        let f = (0..n).map(|_| small_gaussian(rng)).collect();
        TensorSample { d, e, f }
    }

    fn n(&self) -> usize {
        self.f.len()
    }

    /// `D_α = Σ_β D_{αβ} f_β̄` and `E_α = Σ_β E_{αβ̄} f_β`.
    pub fn contractions(&self) -> (Vec<GaussianRational>, Vec<GaussianRational>) {
        let n = self.n();
        let mut da = vec![GaussianRational::zero(); n];
        let mut ea = vec![GaussianRational::zero(); n];
        for a in 0..n {
            for b in 0..n {
                da[a] += &(&self.d[a][b] * &self.f[b].conj());
                ea[a] += &(&self.e[a][b] * &self.f[b]);
            }
        }
        (da, ea)
    }

    /// `Σ_{αβγ} |D_{αβ} f_γ̄ + E_{αγ̄} f_β|²`, by brute force.
    pub fn mixed_norm(&self) -> BigRational {
        let n = self.n();
        let mut total = BigRational::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let x = &(&self.d[a][b] * &self.f[c].conj()) + &(&self.e[a][c] * &self.f[b]);
                    total += x.norm_sqr();
                }
            }
        }
        total
    }

    /// `|D|²|f|² + D_α Ē_α + E_α D̄_α + |E|²|f|²`
    pub fn expansion(&self) -> GaussianRational {
        let f2: BigRational = self.f.iter().map(|x| x.norm_sqr()).sum();
        let sq = |m: &Vec<Vec<GaussianRational>>| -> BigRational { m.iter().flatten().map(|x| x.norm_sqr()).sum() };
        let (da, ea) = self.contractions();
        let mut cross = GaussianRational::zero();
        for a in 0..self.n() {
            cross += &(&da[a] * &ea[a].conj());
            cross += &(&ea[a] * &da[a].conj());
        }
        &GaussianRational::from_real((sq(&self.d) + sq(&self.e)) * f2) + &cross
    }

    /// `|D_α + E_α|²`
    pub fn lower_bound(&self) -> BigRational {
        let (da, ea) = self.contractions();
        da.iter().zip(&ea).map(|(x, y)| (x + y).norm_sqr()).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TensorReport {
    pub n: usize,
    pub samples: usize,
    pub equality_failures: usize,
    pub inequality_failures: usize,
    /// With `E = 0`: `|D_{αβ}|²|f|² ≥ |D_α|²` against the row-wise Cauchy–Schwarz bound.
    pub cauchy_schwarz_failures: usize,
}

impl TensorReport {
    pub fn passed(&self) -> bool {
        self.equality_failures == 0 && self.inequality_failures == 0 && self.cauchy_schwarz_failures == 0
    }
}

pub fn tensor_identity_tests(seed: u64, samples: usize, n: usize) -> TensorReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TensorReport { n, samples, ..Default::default() };
    for _ in 0..samples {
        let t = TensorSample::random(&mut rng, n);
        let lhs = t.mixed_norm();
        let mid = t.expansion();
        if !mid.im.is_zero() || mid.re != lhs {
            report.equality_failures += 1;
        }
        if lhs < t.lower_bound() {
            report.inequality_failures += 1;
        }
        let mut d_only = t.clone();
        d_only.e = vec![vec![GaussianRational::zero(); n]; n];
        let (da, _) = d_only.contractions();
        let f2: BigRational = t.f.iter().map(|x| x.norm_sqr()).sum();
        for a in 0..n {
            let row: BigRational = t.d[a].iter().map(|x| x.norm_sqr()).sum();
            if da[a].norm_sqr() > &row * &f2 {
                report.cauchy_schwarz_failures += 1;
            }
        }
        if d_only.mixed_norm() != d_only.expansion().re {
            report.equality_failures += 1;
        }
    }
    report
}
