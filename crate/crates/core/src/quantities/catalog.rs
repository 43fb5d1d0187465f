//! Named quantities built from the jets of the solution.

use crate::algebra::{AffineExponent, Expr, Frac, Param, ParamPoly};
use crate::jets::{CRContext, IndexLetter};

use super::coeffs::{Coefficients, TwistSign};
use super::QuantityError;

/// A built quantity: scalar, vector over `α`, or matrix over `(α, β)`.
#[derive(Clone, Debug)]
pub enum Quantity {
    Scalar(Expr),
    Fraction(Frac),
    Vector(Vec<Expr>),
    Matrix(Vec<Vec<Expr>>),
}

pub const QUANTITY_NAMES: &[&str] = &[
    "g", "gbar", "grad_sq", "h", "s", "D2", "E2", "D", "E", "G", "c1", "c2", "c3", "c4", "c5", "c6", "psi", "A_f",
];

/// Every named quantity for one context, built once.
pub struct Catalog<'a> {
    pub ctx: &'a CRContext,
    pub coeffs: Coefficients,
    pub fa: Vec<Expr>,
    pub fb: Vec<Expr>,
    pub f0: Expr,
    pub g: Expr,
    pub gbar: Expr,
    pub grad_sq: Expr,
    pub s: Expr,
    /// `D_{αβ} = f_{αβ} − 2 f_α f_β`
    pub d2: Vec<Vec<Expr>>,
    /// `E_{αβ̄} = f_{αβ̄} − (1/n) f_{γγ̄} δ_{αβ}`
    pub e2: Vec<Vec<Expr>>,
    pub d: Vec<Expr>,
    pub e: Vec<Expr>,
    pub gv: Vec<Expr>,
    pub db: Vec<Expr>,
    pub eb: Vec<Expr>,
    pub gvb: Vec<Expr>,
}

impl<'a> Catalog<'a> {
    pub fn new(ctx: &'a CRContext) -> Self {
        Self::with_sign(ctx, TwistSign::default())
    }

    pub fn with_sign(ctx: &'a CRContext, sign: TwistSign) -> Self {
        use IndexLetter::{Anti, Holo, T};
        let n = ctx.n();
        let idx = |a: usize| a as u8 + 1;
        let fa: Vec<Expr> = (0..n).map(|a| ctx.f(&[Holo(idx(a))])).collect();
        let fb: Vec<Expr> = (0..n).map(|a| ctx.f(&[Anti(idx(a))])).collect();
        let f0 = ctx.f(&[T]);
        let g = ctx.g();
        let gbar = ctx.conjugate(&g);
        let grad_sq = ctx.grad_sq();
        let s = grad_sq.add(&ctx.e(2));

        let trace: Expr = (0..n).map(|a| ctx.f(&[Holo(idx(a)), Anti(idx(a))])).sum();
        let inv_n = ParamPoly::frac(1, n as i64);
        let mut d2 = vec![vec![Expr::zero(); n]; n];
        let mut e2 = vec![vec![Expr::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                d2[a][b] = ctx.f(&[Holo(idx(a)), Holo(idx(b))]).sub(&fa[a].mul(&fa[b]).scale(&ParamPoly::int(2)));
                let mut e = ctx.f(&[Holo(idx(a)), Anti(idx(b))]);
                if a == b {
                    e.sub_assign_ref(&trace.scale(&inv_n));
                }
                e2[a][b] = e;
            }
        }
        let d: Vec<Expr> = (0..n).map(|a| (0..n).map(|b| d2[a][b].mul(&fb[b])).sum()).collect();
        let e: Vec<Expr> = (0..n).map(|a| (0..n).map(|b| e2[a][b].mul(&fa[b])).sum()).collect();
        let gv: Vec<Expr> = (0..n)
            .map(|a| ctx.f(&[Holo(idx(a)), T]).scale(&ParamPoly::i()).add(&g.mul(&fa[a])))
            .collect();
        let conj_all = |v: &[Expr]| v.iter().map(|x| ctx.conjugate(x)).collect::<Vec<_>>();
        let (db, eb, gvb) = (conj_all(&d), conj_all(&e), conj_all(&gv));
        let coeffs = Coefficients::with_sign(&f0, &s, ctx.h_base(), sign);
        Catalog { ctx, coeffs, fa, fb, f0, g, gbar, grad_sq, s, d2, e2, d, e, gv, db, eb, gvb }
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    /// `e^{(2n+m−2)f} h^{−m/2}`
    pub fn weight(&self) -> Expr {
        let n = self.n() as i64;
        let e = AffineExponent::int(2 * n - 2).with_slope(Param::M, 1.into());
        let h = AffineExponent::zero().with_slope(Param::M, (-1, 2).into());
        self.ctx.e_pow(e).mul(&self.ctx.h_pow(h))
    }

    pub fn norm_sq(&self, x: &Expr) -> Expr {
        self.ctx.norm_sq(x)
    }

    pub fn frac_norm_sq(&self, x: &Frac) -> Frac {
        x.mul(&x.map_num(|e| self.ctx.conjugate(e)))
    }

    /// `Σ_{αβ} |D_{αβ}|² + |E_{αβ̄}|²`
    pub fn tensor_sq(&self) -> Expr {
        let mut out = Expr::zero();
        for a in 0..self.n() {
            for b in 0..self.n() {
                out.add_assign_ref(&self.norm_sq(&self.d2[a][b]));
                out.add_assign_ref(&self.norm_sq(&self.e2[a][b]));
            }
        }
        out
    }

    /// `Σ_{αβγ} |D_{αβ} f_γ̄ + E_{αγ̄} f_β|²`
    pub fn mixed_tensor_sq(&self) -> Expr {
        let n = self.n();
        let mut out = Expr::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let x = self.d2[a][b].mul(&self.fb[c]).add(&self.e2[a][c].mul(&self.fa[b]));
                    out.add_assign_ref(&self.norm_sq(&x));
                }
            }
        }
        out
    }

    /// `Σ_α |V_α|²`
    pub fn vec_sq(&self, v: &[Expr]) -> Expr {
        v.iter().map(|x| self.norm_sq(x)).sum()
    }

    pub fn combine(&self, terms: &[(&[Expr], i64)]) -> Vec<Expr> {
        (0..self.n())
            .map(|a| terms.iter().map(|(v, k)| v[a].scale(&ParamPoly::int(*k))).sum())
            .collect()
    }

    /// `A_f`
    pub fn energy(&self) -> Expr {
        let inner = self
            .ctx
            .e(2)
            .mul(&self.tensor_sq())
            .add(&self.vec_sq(&self.d))
            .add(&self.vec_sq(&self.e))
            .add(&self.vec_sq(&self.gv));
        self.weight().mul(&inner)
    }

    /// `ψ` completed into squares, `c1|G + c2 D + c3 E|² + c4|D + c5 E|² + c6|E|²`.
    pub fn psi_squares(&self) -> Frac {
        let [a, b, c] = psi_squares_parts(&self.coeffs.c, &self.coeffs, &self.d, &self.e, &self.gv, |x| self.ctx.conjugate(x));
        let t = &self.coeffs.factors;
        a.add(&b, t).add(&c, t)
    }

    pub fn build(&self, name: &str) -> Result<Quantity, QuantityError> {
        Ok(match name {
            "g" => Quantity::Scalar(self.g.clone()),
            "gbar" => Quantity::Scalar(self.gbar.clone()),
            "grad_sq" => Quantity::Scalar(self.grad_sq.clone()),
            "h" => Quantity::Scalar(self.ctx.h_def().clone()),
            "s" => Quantity::Scalar(self.s.clone()),
            "D2" => Quantity::Matrix(self.d2.clone()),
            "E2" => Quantity::Matrix(self.e2.clone()),
            "D" => Quantity::Vector(self.d.clone()),
            "E" => Quantity::Vector(self.e.clone()),
            "G" => Quantity::Vector(self.gv.clone()),
            "psi" => Quantity::Fraction(self.psi_squares()),
            "A_f" => Quantity::Scalar(self.energy()),
            c if c.len() == 2 && c.starts_with('c') => match c[1..].parse::<usize>() {
                Ok(k @ 1..=6) => Quantity::Fraction(self.coeffs.get(k).clone()),
                _ => return Err(QuantityError::UnknownName(name.to_string())),
            },
            _ => return Err(QuantityError::UnknownName(name.to_string())),
        })
    }
}

/// The three completed squares of `ψ` for arbitrary vectors `D`, `E`, `G`, with the
/// coefficients taken from `c` (so perturbed coefficients can be passed in).
pub fn psi_squares_parts(
    c: &[Frac; 6],
    co: &Coefficients,
    d: &[Expr],
    e: &[Expr],
    g: &[Expr],
    conj: impl Fn(&Expr) -> Expr,
) -> [Frac; 3] {
    let t = &co.factors;
    let nsq = |x: &Frac| x.mul(&x.map_num(&conj));
    let mut out = [Frac::zero(), Frac::zero(), Frac::zero()];
    for a in 0..d.len() {
        let (da, ea, ga) = (Frac::from_expr(d[a].clone()), Frac::from_expr(e[a].clone()), Frac::from_expr(g[a].clone()));
        let x = ga.add(&c[1].mul(&da), t).add(&c[2].mul(&ea), t);
        let y = da.add(&c[4].mul(&ea), t);
        out[0] = out[0].add(&c[0].mul(&nsq(&x)), t);
        out[1] = out[1].add(&c[3].mul(&nsq(&y)), t);
        out[2] = out[2].add(&c[5].mul(&nsq(&ea)), t);
    }
    out
}
