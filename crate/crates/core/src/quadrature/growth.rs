//! Fitted exponents of `R ↦ ∫_{B_R} F` on log-spaced radius grids.

use num_complex::Complex64;
use serde::Serialize;

use super::{integrate, IntegrateOptions, QuadratureError};
use crate::closed_form::ClosedFormSolution;

/// Least-squares slope of `(x, y)`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub radius: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Sampling parameters shared by all growth series.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSpec {
    pub grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Number of largest radii used for the tail slope.
    pub tail: usize,
}

impl GrowthSpec {
    /// `R ∈ {2⁰, …, 2⁶}`, `10⁶` samples, tolerance `0.3`.
    pub fn standard(seed: u64) -> Self {
        GrowthSpec { grid: (0..=6).map(|k| 2f64.powi(k)).collect(), samples: 1_000_000, seed, tolerance: 0.3, tail: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub integrand: String,
    pub n: usize,
    pub bound: f64,
    /// Slope over the whole grid; this is what the bound is checked against.
    pub slope: f64,
    /// Slope over the largest radii only, the asymptotic exponent.
    pub tail_slope: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub points: Vec<GrowthPoint>,
}

impl GrowthReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("R,estimate,stderr\n");
        for p in &self.points {
            out.push_str(&format!("{},{:e},{:e}\n", p.radius, p.estimate, p.stderr));
        }
        out
    }
}

pub fn growth_series<F>(
    integrand_name: String,
    n: usize,
    bound: f64,
    spec: &GrowthSpec,
    integrand: F,
) -> Result<GrowthReport, QuadratureError>
where
    F: Fn(&[Complex64], f64) -> f64 + Sync,
{
    if spec.grid.len() < 2 {
        return Err(QuadratureError::Range("radius grid needs at least two points".into()));
    }
    let mut points = Vec::new();
    let mut workers = 0;
    for &radius in &spec.grid {
        let opts = IntegrateOptions { stratify_down_to: Some(0.25), exclude_radius: None };
        let est = integrate(&integrand, n, radius, spec.samples, spec.seed, opts)?;
        workers = est.workers;
        points.push(GrowthPoint { radius, estimate: est.value, stderr: est.stderr });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.radius.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.estimate.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    let tail = spec.tail.clamp(2, xs.len());
    let tail_slope = fit_slope(&xs[xs.len() - tail..], &ys[ys.len() - tail..]);
    Ok(GrowthReport {
        integrand: integrand_name,
        n,
        bound,
        slope,
        tail_slope,
        tolerance: spec.tolerance,
        passed: slope <= bound + spec.tolerance,
        samples: spec.samples,
        seed: spec.seed,
        workers,
        points,
    })
}

/// Slope of `log ∫_{B_R} e^{qf} |∂f|^r`, checked against `2n + 2 − q − r`.
pub fn growth_exponent(
    sol: &ClosedFormSolution,
    q: f64,
    r: f64,
    spec: &GrowthSpec,
) -> Result<GrowthReport, QuadratureError> {
    let n = sol.n as f64;
    if !(0.0..=2.0).contains(&r) {
        return Err(QuadratureError::Range(format!("need r in [0, 2], got r = {r}")));
    }
    if r == 0.0 && !(0.0..=n + 2.0).contains(&q) {
        return Err(QuadratureError::Range(format!("with r = 0 need q in [0, n+2] = [0, {}], got q = {q}", n + 2.0)));
    }
    if r > 0.0 && !(q >= 0.0 && q < n + 2.0 - r) {
        return Err(QuadratureError::Range(format!("with r > 0 need q in [0, n+2-r) = [0, {}), got q = {q}", n + 2.0 - r)));
    }
    let bound = 2.0 * n + 2.0 - q - r;
    growth_series(format!("e^({q} f) |df|^{r}"), sol.n, bound, spec, |z, t| {
        let mut v = sol.e2f_f64(z, t).powf(q / 2.0);
        if r != 0.0 {
            v *= sol.grad_sq_f64(z, t).powf(r / 2.0);
        }
        v
    })
}

/// Which integral hypothesis on `u^q` a given exponent falls under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `q ∈ ((2n+1)/n, (2n+2)/n]`: `∫_{B_R} u^q ≤ C R²`
    Quadratic,
    /// `q ∈ [0, (n+2)/n]`: `∫_{B_R} u^q ≤ C R^{2n+2−nq}`
    Homogeneous,
}

pub fn check_integral_hypotheses(
    sol: &ClosedFormSolution,
    q: f64,
    spec: &GrowthSpec,
) -> Result<(Hypothesis, GrowthReport), QuadratureError> {
    let n = sol.n as f64;
    let (hyp, bound) = if q > (2.0 * n + 1.0) / n && q <= (2.0 * n + 2.0) / n {
        (Hypothesis::Quadratic, 2.0)
    } else if (0.0..=(n + 2.0) / n).contains(&q) {
        (Hypothesis::Homogeneous, 2.0 * n + 2.0 - n * q)
    } else {
        return Err(QuadratureError::Range(format!(
            "q = {q} is in neither ((2n+1)/n, (2n+2)/n] = ({}, {}] nor [0, (n+2)/n] = [0, {}]",
            (2.0 * n + 1.0) / n,
            (2.0 * n + 2.0) / n,
            (n + 2.0) / n
        )));
    };
    let report = growth_series(format!("u^{q}"), sol.n, bound, spec, |z, t| sol.eval_u_f64(z, t).powf(q))?;
    Ok((hyp, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((fit_slope(&xs, &ys) - 2.5).abs() < 1e-12);
    }
}
