//! The quadratic form `ψ` in free vectors `D`, `E`, `G` and free reals `f_0`, `s`.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{display_term, AffineExponent, Expr, Frac, Param, ParamPoly, SymId, SymbolTable};

use super::catalog::psi_squares_parts;
use super::coeffs::{coefficients_f64, Coefficients, TwistSign};
use super::identities::{CheckOutcome, ParamMode, ResidualStatus};

/// Free symbols for `D_α, E_α, G_α` (and conjugates), `f_0`, `s`, and the base `h = s² + f_0²`.
pub struct PsiSymbols {
    pub table: SymbolTable,
    pub k: usize,
    d: Vec<(SymId, SymId)>,
    e: Vec<(SymId, SymId)>,
    g: Vec<(SymId, SymId)>,
    pub f0: SymId,
    pub s: SymId,
    pub h: SymId,
}

impl PsiSymbols {
    pub fn new(k: usize) -> Self {
        let mut table = SymbolTable::new();
        let pairs = |name: &str, table: &mut SymbolTable| -> Vec<(SymId, SymId)> {
            (1..=k).map(|a| (table.symbol(&format!("{name}{a}")), table.symbol(&format!("{name}{a}*")))).collect()
        };
        let d = pairs("D", &mut table);
        let e = pairs("E", &mut table);
        let g = pairs("G", &mut table);
        let f0 = table.symbol("f0");
        let s = table.symbol("s");
        let h = table.weight_base("h");
        PsiSymbols { table, k, d, e, g, f0, s, h }
    }

    fn vecs(&self, which: &[(SymId, SymId)]) -> (Vec<Expr>, Vec<Expr>) {
        (which.iter().map(|p| Expr::sym(p.0)).collect(), which.iter().map(|p| Expr::sym(p.1)).collect())
    }

    pub fn conj(&self, e: &Expr) -> Expr {
        e.map_atoms(
            |c| c.conj(),
            |x| {
                for &(a, b) in self.d.iter().chain(&self.e).chain(&self.g) {
                    if x == a {
                        return Some(Expr::sym(b));
                    }
                    if x == b {
                        return Some(Expr::sym(a));
                    }
                }
                None
            },
        )
    }

    fn re(&self, e: &Expr) -> Expr {
        e.add(&self.conj(e)).scale(&ParamPoly::frac(1, 2))
    }

    fn im(&self, e: &Expr) -> Expr {
        e.sub(&self.conj(e)).scale(&ParamPoly::i().scale(&(-1).into()).scale(&crate::algebra::GaussianRational::frac(1, 2)))
    }

    /// Canonical form modulo `h = s² + f_0²`.
    pub fn normal_form(&self, e: &Expr) -> Expr {
        let s = Expr::sym(self.s);
        let square = Expr::weight(self.h, AffineExponent::int(1)).sub(&s.mul(&s));
        e.reduce_square(self.f0, &square)
    }

    /// Sum of squares plus the `m`-dependent pairing with the weight gradient.
    pub fn psi_pairing(&self) -> Expr {
        let (d, _) = self.vecs(&self.d);
        let (e, _) = self.vecs(&self.e);
        let (g, _) = self.vecs(&self.g);
        let f0 = Expr::sym(self.f0);
        let s = Expr::sym(self.s);
        let i = ParamPoly::i();
        let gg = s.sub(&f0.scale(&i));
        let nsq = |x: &Expr| x.mul(&self.conj(x));
        let mut squares = Expr::zero();
        let mut pairing = Expr::zero();
        for a in 0..self.k {
            squares.add_assign_ref(&nsq(&g[a]));
            squares.add_assign_ref(&nsq(&g[a].add(&d[a])));
            squares.add_assign_ref(&nsq(&g[a].sub(&e[a])));
            squares.add_assign_ref(&nsq(&d[a].add(&e[a])));
            let mix = d[a].sub(&e[a].scale(&ParamPoly::int(3))).add(&g[a].scale(&ParamPoly::int(3)));
            let left = f0.mul(&mix).scale(&i).sub(&gg.mul(&d[a].add(&e[a])));
            let right = s.mul(&self.conj(&d[a].add(&e[a]))).add(&f0.mul(&self.conj(&g[a])).scale(&i));
            pairing.add_assign_ref(&left.mul(&right));
        }
        let m = ParamPoly::param(Param::M);
        squares.add(&self.re(&pairing).mul(&Expr::weight(self.h, AffineExponent::int(-1))).scale(&m))
    }

    /// The expanded quadratic form with explicit real and imaginary parts.
    pub fn psi_expanded(&self) -> Expr {
        let (d, _) = self.vecs(&self.d);
        let (e, _) = self.vecs(&self.e);
        let (g, _) = self.vecs(&self.g);
        let f0 = Expr::sym(self.f0);
        let s = Expr::sym(self.s);
        let m = ParamPoly::param(Param::M);
        let h1 = Expr::weight(self.h, AffineExponent::int(1));
        let f02 = f0.mul(&f0);
        let p = h1.sub(&f02.scale(&m));
        let a_coef = h1.scale(&ParamPoly::int(2).sub(&m)).add(&f02.scale(&m));
        let b_coef = h1.scale(&ParamPoly::int(1).sub(&m)).add(&f02.scale(&m));
        let twist = f0.mul(&s).scale(&m.scale(&4.into()));
        let nsq = |x: &Expr| x.mul(&self.conj(x));
        let mut total = Expr::zero();
        for a in 0..self.k {
            let (da, ea, ga) = (&d[a], &e[a], &g[a]);
            total.add_assign_ref(&p.mul(&nsq(ga)).scale(&ParamPoly::int(3)));
            total.add_assign_ref(&a_coef.mul(&nsq(da).add(&nsq(ea))));
            total.add_assign_ref(&p.mul(&self.re(&ga.mul(&self.conj(&da.sub(ea))))).scale(&ParamPoly::int(2)));
            total.sub_assign_ref(&twist.mul(&self.im(&ga.mul(&self.conj(&da.add(ea))))));
            total.add_assign_ref(&b_coef.mul(&self.re(&da.mul(&self.conj(ea)))).scale(&ParamPoly::int(2)));
            total.sub_assign_ref(&twist.mul(&self.im(&da.mul(&self.conj(ea)))));
        }
        total.mul(&Expr::weight(self.h, AffineExponent::int(-1)))
    }

    pub fn coefficients(&self, sign: TwistSign) -> Coefficients {
        Coefficients::with_sign(&Expr::sym(self.f0), &Expr::sym(self.s), self.h, sign)
    }

    pub fn psi_squares(&self, co: &Coefficients) -> Frac {
        let (d, _) = self.vecs(&self.d);
        let (e, _) = self.vecs(&self.e);
        let (g, _) = self.vecs(&self.g);
        let [a, b, c] = psi_squares_parts(&co.c, co, &d, &e, &g, |x| self.conj(x));
        a.add(&b, &co.factors).add(&c, &co.factors)
    }

    fn outcome(&self, label: &str, lhs: &Frac, rhs: &Frac, co: &Coefficients, mode: &ParamMode) -> CheckOutcome {
        let diff = lhs.sub(rhs, &co.factors).num;
        let diff = match mode {
            ParamMode::Formal => diff,
            ParamMode::Rational(v) => diff.substitute_param(Param::M, v),
        };
        let residual = self.normal_form(&diff);
        let status = match residual.sorted_terms().first() {
            None => ResidualStatus::Zero,
            Some((key, c)) => ResidualStatus::Nonzero { witness: display_term(key, c, &self.table) },
        };
        CheckOutcome {
            label: label.to_string(),
            status,
            lhs_terms: lhs.num.len(),
            rhs_terms: rhs.num.len(),
            residual_terms: residual.len(),
        }
    }
}

/// Both equalities for `ψ`, with vectors of length `k`.
pub fn psi_squares_symbolic(k: usize, mode: &ParamMode, sign: TwistSign) -> Vec<CheckOutcome> {
    let sy = PsiSymbols::new(k);
    let co = sy.coefficients(sign);
    let pairing = Frac::from_expr(sy.psi_pairing());
    let expanded = Frac::from_expr(sy.psi_expanded());
    let squares = sy.psi_squares(&co);
    vec![
        sy.outcome("pairing form = expanded form", &pairing, &expanded, &co, mode),
        sy.outcome("expanded form = completed squares", &expanded, &squares, &co, mode),
    ]
}

/// `ψ` at `m = 0`: `|G|² + |G+D|² + |G−E|² + |D+E|²`, in the same symbols.
pub fn psi_at_m0(sy: &PsiSymbols) -> Expr {
    let (d, _) = sy.vecs(&sy.d);
    let (e, _) = sy.vecs(&sy.e);
    let (g, _) = sy.vecs(&sy.g);
    let nsq = |x: &Expr| x.mul(&sy.conj(x));
    (0..sy.k)
        .map(|a| nsq(&g[a]).add(&nsq(&g[a].add(&d[a]))).add(&nsq(&g[a].sub(&e[a]))).add(&nsq(&d[a].add(&e[a]))))
        .sum()
}

/// The expanded form and the completed squares at `m = 0` both equal the four-square
/// oracle `|G|² + |G+D|² + |G−E|² + |D+E|²`.
pub fn psi_m0_specialization(k: usize, sign: TwistSign) -> Vec<CheckOutcome> {
    let sy = PsiSymbols::new(k);
    let co = sy.coefficients(sign);
    let zero = ParamMode::Rational(BigRational::zero());
    let oracle = Frac::from_expr(psi_at_m0(&sy));
    vec![
        sy.outcome("expanded form at m = 0", &Frac::from_expr(sy.psi_expanded()), &oracle, &co, &zero),
        sy.outcome("completed squares at m = 0", &sy.psi_squares(&co), &oracle, &co, &zero),
    ]
}

/// A random instance of the scalar data of `ψ`.
#[derive(Clone, Copy, Debug)]
pub struct PsiSample {
    pub m: f64,
    pub f0: f64,
    pub s: f64,
}

/// Hermitian matrix `M` with `ψ = v* M v` for `v = (D, E, G)` at one index.
pub fn psi_hermitian(p: PsiSample) -> Matrix3<Complex64> {
    let PsiSample { m, f0, s } = p;
    let h = s * s + f0 * f0;
    let root = (h - f0 * f0).max(0.0).sqrt();
    let pp = h - m * f0 * f0;
    let a = (2.0 - m) * h + m * f0 * f0;
    let b = (1.0 - m) * h + m * f0 * f0;
    let tw = Complex64::new(0.0, 2.0 * m * f0 * root);
    let r = |x: f64| Complex64::new(x, 0.0);
    // rows and columns ordered (D, E, G); entry (i, j) multiplies conj(v_i) v_j
    let mut mat = Matrix3::new(
        r(a),
        r(b) - tw,
        r(pp) + tw,
        r(b) + tw,
        r(a),
        r(-pp) + tw,
        r(pp) - tw,
        r(-pp) - tw,
        r(3.0 * pp),
    );
    mat /= r(h);
    mat
}

/// Direct evaluation of the expanded form, with the genuine square root.
pub fn psi_expanded_f64(p: PsiSample, d: &[Complex64], e: &[Complex64], g: &[Complex64]) -> f64 {
    let PsiSample { m, f0, s } = p;
    let h = s * s + f0 * f0;
    let root = (h - f0 * f0).max(0.0).sqrt();
    let pp = h - m * f0 * f0;
    let mut total = 0.0;
    for a in 0..d.len() {
        let (da, ea, ga) = (d[a], e[a], g[a]);
        total += 3.0 * pp * ga.norm_sqr()
            + ((2.0 - m) * h + m * f0 * f0) * (da.norm_sqr() + ea.norm_sqr())
            + 2.0 * pp * (ga * (da - ea).conj()).re
            - 4.0 * m * f0 * root * (ga * (da + ea).conj()).im
            + 2.0 * ((1.0 - m) * h + m * f0 * f0) * (da * ea.conj()).re
            - 4.0 * m * f0 * root * (da * ea.conj()).im;
    }
    total / h
}

pub fn psi_squares_f64(p: PsiSample, d: &[Complex64], e: &[Complex64], g: &[Complex64], sign: TwistSign) -> f64 {
    let c = coefficients_f64(p.m, p.f0, p.s, sign);
    (0..d.len())
        .map(|a| {
            c[0].re * (g[a] + c[1] * d[a] + c[2] * e[a]).norm_sqr()
                + c[3].re * (d[a] + c[4] * e[a]).norm_sqr()
                + c[5].re * e[a].norm_sqr()
        })
        .sum()
}

#[derive(Clone, Debug)]
pub struct NumericPsiReport {
    pub samples: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
}

impl NumericPsiReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tolerance
    }
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// Floating-point comparison of the expanded form with the completed squares.
pub fn psi_squares_numeric(seed: u64, samples: usize, k: usize, tolerance: f64, sign: TwistSign) -> NumericPsiReport {
    const CHUNK: usize = 1024;
    let chunks = samples.div_ceil(CHUNK);
    let max_rel_err = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let count = CHUNK.min(samples - ci * CHUNK);
            let mut worst: f64 = 0.0;
            for _ in 0..count {
                let p = PsiSample { m: rng.random_range(0.0..=1.0), f0: rng.random_range(-3.0..3.0), s: rng.random_range(0.05..3.0) };
                let d: Vec<_> = (0..k).map(|_| rand_c(&mut rng)).collect();
                let e: Vec<_> = (0..k).map(|_| rand_c(&mut rng)).collect();
                let g: Vec<_> = (0..k).map(|_| rand_c(&mut rng)).collect();
                let a = psi_expanded_f64(p, &d, &e, &g);
                let b = psi_squares_f64(p, &d, &e, &g, sign);
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    NumericPsiReport { samples, max_rel_err, tolerance }
}

#[derive(Clone, Debug)]
pub struct PsdReport {
    pub m: f64,
    pub samples: usize,
    pub min_eigenvalue: f64,
    pub worst: Option<PsiSample>,
}

impl PsdReport {
    pub fn positive(&self) -> bool {
        self.min_eigenvalue > 0.0
    }
}

/// Smallest eigenvalue of the Hermitian form of `ψ`.
pub fn min_eigenvalue(p: PsiSample) -> f64 {
    let mat = psi_hermitian(p);
    // real symmetric embedding [[Re, −Im], [Im, Re]] has the same spectrum, doubled
    let real = DMatrix::from_fn(6, 6, |i, j| {
        let z = mat[(i % 3, j % 3)];
        match (i < 3, j < 3) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    SymmetricEigen::new(real).eigenvalues.min()
}

/// Minimum eigenvalue of `ψ`'s coefficient matrix over random `(f_0, s)`. The form is
/// homogeneous of degree zero in `(f_0, s)`, so the ratio is sampled on a half circle.
pub fn psd_check_psi(m: f64, samples: usize, seed: u64) -> PsdReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = None;
    let mut min_eig = f64::INFINITY;
    for _ in 0..samples {
        let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let radius: f64 = rng.random_range(0.1..10.0);
        let s = radius * angle.sin();
        if s <= 0.0 {
            continue;
        }
        let p = PsiSample { m, f0: radius * angle.cos(), s };
        let ev = min_eigenvalue(p);
        if ev < min_eig {
            min_eig = ev;
            worst = Some(p);
        }
    }
    PsdReport { m, samples, min_eigenvalue: min_eig, worst }
}
