//! Floating-point jets of parsed expressions in the real coordinates `(x, y, t)`.

pub mod taylor;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::closed_form::{ClosedFormSolution, HPoint, Pairing};
use crate::jets::{canonical_words, canonicalize_letters, IndexLetter, Word};
use crate::syntax::{Func, Node, Var};

pub use taylor::{Basis, TaylorValue3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("domain violation in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
    #[error("expression uses {var}, beyond dimension n = {n}")]
    Dimension { var: String, n: usize },
}

/// A point `(x_1..x_n, y_1..y_n, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoint {
    pub n: usize,
    pub coords: Vec<f64>,
}

impl RealPoint {
    pub fn new(x: &[f64], y: &[f64], t: f64) -> Self {
        let mut coords = x.to_vec();
        coords.extend_from_slice(y);
        coords.push(t);
        RealPoint { n: x.len(), coords }
    }

    pub fn from_hpoint(p: &HPoint) -> Self {
        let (z, t) = p.to_f64();
        let x: Vec<f64> = z.iter().map(|c| c.re).collect();
        let y: Vec<f64> = z.iter().map(|c| c.im).collect();
        RealPoint::new(&x, &y, t)
    }

    pub fn z(&self, a: usize) -> Complex64 {
        Complex64::new(self.coords[a], self.coords[self.n + a])
    }

    pub fn t(&self) -> f64 {
        self.coords[2 * self.n]
    }
}

fn positive_real(v: Complex64) -> bool {
    v.re > 0.0 && v.im.abs() <= 1e-12 * v.re
}

fn domain(node: &Node, reason: impl Into<String>) -> NumericError {
    NumericError::Domain { subexpr: node.to_string(), reason: reason.into() }
}

fn check_vars(node: &Node, n: usize) -> Result<(), NumericError> {
    node.check_dimension(n).map_err(|_| {
        let k = node.max_index();
        NumericError::Dimension { var: format!("index {k}"), n }
    })
}

/// Evaluated Taylor data of `node` at `p`.
pub fn taylor_eval(node: &Node, p: &RealPoint) -> Result<TaylorValue3, NumericError> {
    check_vars(node, p.n)?;
    let basis = Basis::get(2 * p.n + 1);
    eval_node(node, p, &basis)
}

fn eval_node(node: &Node, p: &RealPoint, b: &Arc<Basis>) -> Result<TaylorValue3, NumericError> {
    let n = p.n;
    Ok(match node {
        Node::Var { var, .. } => {
            let i = var.index(n);
            TaylorValue3::variable(b, i, p.coords[i])
        }
        Node::Num(r) => TaylorValue3::constant(b, Complex64::new(crate::algebra::rational::rat_to_f64(r), 0.0)),
        Node::I => TaylorValue3::constant(b, Complex64::i()),
        Node::Add(x, y) => eval_node(x, p, b)?.add(&eval_node(y, p, b)?),
        Node::Sub(x, y) => eval_node(x, p, b)?.sub(&eval_node(y, p, b)?),
        Node::Mul(x, y) => eval_node(x, p, b)?.mul(&eval_node(y, p, b)?),
        Node::Div(x, y) => {
            let den = eval_node(y, p, b)?;
            if den.value().norm() == 0.0 {
                return Err(domain(y, "division by zero"));
            }
            eval_node(x, p, b)?.mul(&den.recip())
        }
        Node::Neg(x) => eval_node(x, p, b)?.neg(),
        Node::Pow(x, k) => {
            let base = eval_node(x, p, b)?;
            if *k < 0 && base.value().norm() == 0.0 {
                return Err(domain(x, "negative power of zero"));
            }
            base.powi(*k)
        }
        Node::Call(f, x) => {
            let a = eval_node(x, p, b)?;
            match f {
                Func::Exp => a.exp(),
                Func::Log | Func::Sqrt if !positive_real(a.value()) => {
                    return Err(domain(x, format!("{} needs a positive argument, got {}", f.name(), a.value())));
                }
                Func::Log => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs2 => a.mul(&a.conj()),
            }
        }
    })
}

/// Plain evaluation, with the same domain guards.
pub fn eval_value(node: &Node, coords: &[f64], n: usize) -> Result<Complex64, NumericError> {
    Ok(match node {
        Node::Var { var, .. } => Complex64::new(coords[var.index(n)], 0.0),
        Node::Num(r) => Complex64::new(crate::algebra::rational::rat_to_f64(r), 0.0),
        Node::I => Complex64::i(),
        Node::Add(x, y) => eval_value(x, coords, n)? + eval_value(y, coords, n)?,
        Node::Sub(x, y) => eval_value(x, coords, n)? - eval_value(y, coords, n)?,
        Node::Mul(x, y) => eval_value(x, coords, n)? * eval_value(y, coords, n)?,
        Node::Div(x, y) => {
            let den = eval_value(y, coords, n)?;
            if den.norm() == 0.0 {
                return Err(domain(y, "division by zero"));
            }
            eval_value(x, coords, n)? / den
        }
        Node::Neg(x) => -eval_value(x, coords, n)?,
        Node::Pow(x, k) => {
            let v = eval_value(x, coords, n)?;
            if *k < 0 && v.norm() == 0.0 {
                return Err(domain(x, "negative power of zero"));
            }
            v.powi(*k as i32)
        }
        Node::Call(f, x) => {
            let a = eval_value(x, coords, n)?;
            match f {
                Func::Exp => a.exp(),
                Func::Log | Func::Sqrt if !positive_real(a) => {
                    return Err(domain(x, format!("{} needs a positive argument, got {a}", f.name())));
                }
                Func::Log => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs2 => Complex64::new(a.norm_sqr(), 0.0),
            }
        }
    })
}

/// Floating CR jets `f_w` for canonical words `|w| ≤ 3`, with `f` and `e^{2f}`.
#[derive(Clone, Debug)]
pub struct CRJetNumeric {
    pub n: usize,
    pub values: BTreeMap<Word, Complex64>,
    pub f: Complex64,
    pub e2f: Complex64,
}

impl CRJetNumeric {
    /// `f_w` for any word, reordered with the commutator.
    pub fn get(&self, w: &[IndexLetter]) -> Complex64 {
        canonicalize_letters(w).iter().map(|(cw, c)| c.to_complex() * self.values[cw]).sum()
    }

    /// `|∂f|² = Σ f_α f_ᾱ`
    pub fn grad_sq(&self) -> Complex64 {
        (1..=self.n as u8).map(|a| self.get(&[IndexLetter::Holo(a)]) * self.get(&[IndexLetter::Anti(a)])).sum()
    }

    /// `g = |∂f|² + e^{2f} − i f_0`
    pub fn g(&self) -> Complex64 {
        self.grad_sq() + self.e2f - Complex64::i() * self.get(&[IndexLetter::T])
    }

    /// `max_{α,β} |f_{β̄α} − f_{αβ̄} + 2i δ_{αβ} f_0|`, computed from words applied literally.
    pub fn commutator_defect(&self, direct: &FxHashMap<Word, Complex64>) -> f64 {
        let mut worst: f64 = 0.0;
        let f0 = self.values[&Word::from_slice(&[IndexLetter::T])];
        for a in 1..=self.n as u8 {
            for b in 1..=self.n as u8 {
                let ba = direct[&Word::from_slice(&[IndexLetter::Anti(b), IndexLetter::Holo(a)])];
                let ab = direct[&Word::from_slice(&[IndexLetter::Holo(a), IndexLetter::Anti(b)])];
                let delta = if a == b { 2.0 * Complex64::i() * f0 } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((ba - ab + delta).norm() / ab.norm().max(1.0));
            }
        }
        worst
    }
}

/// Applies `Z_α = ½(∂_{x_α} − i∂_{y_α}) + i z̄_α ∂_t`, `Z_ᾱ = ½(∂_{x_α} + i∂_{y_α}) − i z_α ∂_t`
/// or `∂_t` to truncated Taylor data; the result is exact through one degree less.
pub fn apply_letter(f: &TaylorValue3, letter: IndexLetter, p: &RealPoint) -> TaylorValue3 {
    let n = p.n;
    let b = &f.basis;
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::i();
    let dt = f.derivative(2 * n);
    match letter {
        IndexLetter::T => dt,
        IndexLetter::Holo(a) | IndexLetter::Anti(a) => {
            let a = a as usize - 1;
            let x = TaylorValue3::variable(b, a, p.coords[a]);
            let y = TaylorValue3::variable(b, n + a, p.coords[n + a]);
            let dx = f.derivative(a);
            let dy = f.derivative(n + a);
            if matches!(letter, IndexLetter::Holo(_)) {
                let zbar = x.sub(&y.scale(i));
                dx.sub(&dy.scale(i)).scale(half).add(&zbar.mul(&dt).scale(i))
            } else {
                let z = x.add(&y.scale(i));
                dx.add(&dy.scale(i)).scale(half).sub(&z.mul(&dt).scale(i))
            }
        }
    }
}

/// Jets of all canonical words `|w| ≤ 3` and, for the commutator check, all
/// two-letter words applied literally.
pub fn cr_jets_with_words(tv: &TaylorValue3, p: &RealPoint) -> (CRJetNumeric, FxHashMap<Word, Complex64>) {
    let n = p.n;
    let mut series: FxHashMap<Word, TaylorValue3> = FxHashMap::default();
    let mut values = BTreeMap::new();
    for len in 1..=3 {
        for w in canonical_words(n, len) {
            let (last, head) = w.split_last().unwrap();
            let prev = if head.is_empty() { tv } else { &series[&Word::from_slice(head)] };
            let s = apply_letter(prev, *last, p);
            values.insert(w.clone(), s.value());
            if len < 3 {
                series.insert(w, s);
            }
        }
    }
    let mut direct = FxHashMap::default();
    let letters = IndexLetter::all(n);
    for &a in &letters {
        let first = apply_letter(tv, a, p);
        for &b in &letters {
            direct.insert(Word::from_slice(&[a, b]), apply_letter(&first, b, p).value());
        }
    }
    let f = tv.value();
    (CRJetNumeric { n, values, f, e2f: (2.0 * f).exp() }, direct)
}

pub fn cr_jets_from_taylor(tv: &TaylorValue3, p: &RealPoint) -> CRJetNumeric {
    cr_jets_with_words(tv, p).0
}

/// Central difference steps: `h1` for first derivatives, `h2` for second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdSteps {
    pub h1: f64,
    pub h2: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps { h1: 1e-6, h2: 1e-4 }
    }
}

impl FdSteps {
    /// Steps for polynomials of degree ≤ 3, where the stencils have no truncation error
    /// in second order and the error is pure roundoff.
    pub fn polynomial() -> Self {
        FdSteps { h1: 1e-5, h2: 1e-2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdReport {
    /// `max |fd − ad| / max(|ad|, 1)`
    pub max_deviation: f64,
    pub worst: String,
    pub compared: usize,
}

/// Compares all first and second real partials of `node` at `p` against Taylor data.
pub fn fd_crosscheck(node: &Node, p: &RealPoint, steps: FdSteps) -> Result<FdReport, NumericError> {
    let tv = taylor_eval(node, p)?;
    let d = p.coords.len();
    let at = |shifts: &[(usize, f64)]| -> Result<Complex64, NumericError> {
        let mut c = p.coords.clone();
        for &(i, h) in shifts {
            c[i] += h;
        }
        eval_value(node, &c, p.n)
    };
    let mut report = FdReport { max_deviation: 0.0, worst: String::new(), compared: 0 };
    let mut record = |name: String, fd: Complex64, ad: Complex64| {
        let dev = (fd - ad).norm() / ad.norm().max(1.0);
        report.compared += 1;
        if dev > report.max_deviation || report.worst.is_empty() {
            report.max_deviation = report.max_deviation.max(dev);
            report.worst = name;
        }
    };
    let (h1, h2) = (steps.h1, steps.h2);
    let f0 = at(&[])?;
    for i in 0..d {
        let fd = (at(&[(i, h1)])? - at(&[(i, -h1)])?) / (2.0 * h1);
        record(format!("d{i}"), fd, tv.partial(&[i]));
        let fd2 = (at(&[(i, h2)])? - 2.0 * f0 + at(&[(i, -h2)])?) / (h2 * h2);
        record(format!("d{i}d{i}"), fd2, tv.partial(&[i, i]));
        for j in i + 1..d {
            let mixed = (at(&[(i, h2), (j, h2)])? - at(&[(i, h2), (j, -h2)])? - at(&[(i, -h2), (j, h2)])?
                + at(&[(i, -h2), (j, -h2)])?)
                / (4.0 * h2 * h2);
            record(format!("d{i}d{j}"), mixed, tv.partial(&[i, j]));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct NumericResidual {
    /// `Δ_b f − n|∂f|² − n e^{2f}` with `Δ_b f = −Re Σ f_{αᾱ}`.
    pub residual: Complex64,
    pub d: Vec<Vec<Complex64>>,
    pub e: Vec<Vec<Complex64>>,
    pub g: Vec<Complex64>,
}

impl NumericResidual {
    pub fn max_tensor(&self) -> f64 {
        self.d.iter().flatten().chain(self.e.iter().flatten()).chain(&self.g).map(|x| x.norm()).fold(0.0, f64::max)
    }
}

pub fn residual_from_jets(j: &CRJetNumeric) -> NumericResidual {
    use IndexLetter::{Anti, Holo, T};
    let n = j.n;
    let idx = |a: usize| a as u8 + 1;
    let trace: Complex64 = (0..n).map(|a| j.get(&[Holo(idx(a)), Anti(idx(a))])).sum();
    let nn = n as f64;
    let residual = Complex64::new(-trace.re, 0.0) - nn * j.grad_sq() - nn * j.e2f;
    let g = j.g();
    let mut d = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut e = d.clone();
    let mut gv = Vec::with_capacity(n);
    for a in 0..n {
        let fa = j.get(&[Holo(idx(a))]);
        for b in 0..n {
            let fb = j.get(&[Holo(idx(b))]);
            d[a][b] = j.get(&[Holo(idx(a)), Holo(idx(b))]) - 2.0 * fa * fb;
            e[a][b] = j.get(&[Holo(idx(a)), Anti(idx(b))]) - if a == b { trace / nn } else { Complex64::new(0.0, 0.0) };
        }
        gv.push(Complex64::i() * j.get(&[Holo(idx(a)), T]) + g * fa);
    }
    NumericResidual { residual, d, e, g: gv }
}

pub fn numeric_residual(node: &Node, p: &RealPoint) -> Result<NumericResidual, NumericError> {
    let tv = taylor_eval(node, p)?;
    Ok(residual_from_jets(&cr_jets_from_taylor(&tv, p)))
}

fn gauss(c: &crate::algebra::GaussianRational) -> Node {
    Node::num(c.re.clone()) + Node::num(c.im.clone()) * Node::I
}

/// `f = ½ log N − ½ log |w|² − log 2` as an expression in `(x, y, t)`.
pub fn family_expression(sol: &ClosedFormSolution) -> Node {
    let mut w = Node::var(Var::T) + gauss(&sol.lambda);
    for a in 1..=sol.n {
        let (x, y) = (Node::var(Var::X(a)), Node::var(Var::Y(a)));
        let zz = x.clone().powi2() + y.clone().powi2();
        w = w + Node::I * zz;
        let z = match sol.pairing {
            Pairing::MuZ => x + Node::I * y,
            Pairing::MuZbar => x - Node::I * y,
        };
        w = w + gauss(&sol.mu[a - 1]) * z;
    }
    let half = Node::num(crate::algebra::rat(1, 2));
    half.clone() * Node::call(Func::Log, Node::num(sol.big_n.clone()))
        - half * Node::call(Func::Log, Node::call(Func::Abs2, w))
        - Node::call(Func::Log, Node::int(2))
}

trait Square {
    fn powi2(self) -> Node;
}

impl Square for Node {
    fn powi2(self) -> Node {
        Node::Pow(Box::new(self), 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expression;
    use IndexLetter::{Anti, Holo, T};

    fn jets(s: &str, p: &RealPoint) -> CRJetNumeric {
        cr_jets_from_taylor(&taylor_eval(&parse_expression(s).unwrap(), p).unwrap(), p)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn real_partials() {
        let p = RealPoint::new(&[0.3], &[-1.2], 0.5);
        let tv = taylor_eval(&parse_expression("t").unwrap(), &p).unwrap();
        assert_eq!(tv.partial(&[2]), Complex64::new(1.0, 0.0));
        assert_eq!(tv.partial(&[0]), Complex64::new(0.0, 0.0));
        let tv = taylor_eval(&parse_expression("x1^2*y1").unwrap(), &p).unwrap();
        assert!(close(tv.partial(&[0, 0, 1]), Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn cr_examples() {
        let p = RealPoint::new(&[0.3], &[-1.2], 0.5);
        let z = p.z(0);
        assert!(close(jets("x1", &p).get(&[Holo(1)]), Complex64::new(0.5, 0.0)));
        assert!(close(jets("x1^2 + y1^2", &p).get(&[Holo(1)]), z.conj()));
        let jt = jets("t", &p);
        assert!(close(jt.get(&[Holo(1)]), Complex64::i() * z.conj()));
        assert!(close(jt.get(&[T]), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let p = RealPoint::new(&[0.0], &[0.0], 0.0);
        match taylor_eval(&parse_expression("1 + log(x1 - 1)").unwrap(), &p) {
            Err(NumericError::Domain { subexpr, .. }) => assert_eq!(subexpr, "x1 - 1"),
            other => panic!("{other:?}"),
        }
        assert!(taylor_eval(&parse_expression("x2").unwrap(), &p).is_err());
        assert!(taylor_eval(&parse_expression("1/x1").unwrap(), &p).is_err());
    }

    #[test]
    fn constant_function_residual() {
        let p = RealPoint::new(&[0.2, 0.1], &[0.4, -0.3], 1.0);
        let r = numeric_residual(&parse_expression("0").unwrap(), &p).unwrap();
        assert!(close(r.residual, Complex64::new(-2.0, 0.0)));
        let fd = fd_crosscheck(&parse_expression("7/3").unwrap(), &p, FdSteps::default()).unwrap();
        assert_eq!(fd.max_deviation, 0.0);
    }

    #[test]
    fn commutator_and_conjugation() {
        let p = RealPoint::new(&[0.2, -0.7], &[0.4, 0.3], -0.6);
        let e = parse_expression("exp(x1*t - y2) + log(1 + x1^2 + t^2)*y1 + sqrt(2 + x2^2)").unwrap();
        let tv = taylor_eval(&e, &p).unwrap();
        let (j, direct) = cr_jets_with_words(&tv, &p);
        assert!(j.commutator_defect(&direct) < 1e-12);
        for a in 1..=2 {
            assert!(close(j.get(&[Holo(a)]).conj(), j.get(&[Anti(a)])));
        }
    }
}
