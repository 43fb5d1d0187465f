//! Exact jets of functions `f = Σ_k a_k ln Q_k + c` with polynomial `Q_k` in `z, z̄, t`.

use std::collections::BTreeMap;
use std::convert::Infallible;

use num_rational::BigRational;

use rustc_hash::FxHashMap;

use crate::algebra::{AffineExponent, Derivation, Expr, GaussianRational, ParamPoly, SymId, SymbolTable};
use crate::jets::{canonical_words, canonicalize_letters, IndexLetter, Word};

use super::{ClosedFormError, HPoint};

/// The coordinate functions and the action of `Z_α`, `Z_ᾱ`, `∂_t` on them.
pub struct Coordinates {
    pub n: usize,
    pub table: SymbolTable,
    pub z: Vec<SymId>,
    pub zb: Vec<SymId>,
    pub t: SymId,
}

impl Coordinates {
    pub fn new(n: usize) -> Self {
        let mut table = SymbolTable::new();
        let z = (1..=n).map(|a| table.symbol(&format!("z{a}"))).collect();
        let zb = (1..=n).map(|a| table.symbol(&format!("zb{a}"))).collect();
        let t = table.symbol("t");
        Coordinates { n, table, z, zb, t }
    }

    pub fn z(&self, a: usize) -> Expr {
        Expr::sym(self.z[a])
    }

    pub fn zb(&self, a: usize) -> Expr {
        Expr::sym(self.zb[a])
    }

    pub fn t(&self) -> Expr {
        Expr::sym(self.t)
    }

    /// `|z|²`
    pub fn z_sq(&self) -> Expr {
        (0..self.n).map(|a| self.z(a).mul(&self.zb(a))).sum()
    }

    fn on_symbol(&self, s: SymId, d: IndexLetter) -> Expr {
        let i = ParamPoly::i();
        match d {
            IndexLetter::Holo(a) => {
                let a = a as usize - 1;
                if s == self.z[a] {
                    Expr::one()
                } else if s == self.t {
                    self.zb(a).scale(&i)
                } else {
                    Expr::zero()
                }
            }
            IndexLetter::Anti(a) => {
                let a = a as usize - 1;
                if s == self.zb[a] {
                    Expr::one()
                } else if s == self.t {
                    self.z(a).scale(&i.neg())
                } else {
                    Expr::zero()
                }
            }
            IndexLetter::T => {
                if s == self.t {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
        }
    }

    pub fn values(&self, p: &HPoint) -> FxHashMap<SymId, GaussianRational> {
        let mut v = FxHashMap::default();
        for a in 0..self.n {
            v.insert(self.z[a], p.z[a].clone());
            v.insert(self.zb[a], p.z[a].conj());
        }
        v.insert(self.t, GaussianRational::from_real(p.t.clone()));
        v
    }
}

struct Rule<'a> {
    f: &'a LogFunction,
    d: IndexLetter,
}

impl Derivation for Rule<'_> {
    type Error = Infallible;

    fn symbol(&self, s: SymId) -> Result<Expr, Infallible> {
        Ok(self.f.coords.on_symbol(s, self.d))
    }

    fn base(&self, b: SymId) -> Result<Expr, Infallible> {
        Ok(self.f.base_derivatives.get(&(b, self.d)).cloned().unwrap_or_default())
    }
}

struct PolyRule<'a> {
    coords: &'a Coordinates,
    d: IndexLetter,
}

impl Derivation for PolyRule<'_> {
    type Error = Infallible;

    fn symbol(&self, s: SymId) -> Result<Expr, Infallible> {
        Ok(self.coords.on_symbol(s, self.d))
    }

    fn base(&self, _b: SymId) -> Result<Expr, Infallible> {
        Ok(Expr::zero())
    }
}

pub struct LogTerm {
    pub coeff: BigRational,
    pub base: SymId,
    pub poly: Expr,
}

/// `f = Σ_k a_k ln Q_k + c`, given by the `(a_k, Q_k)` and `e^{2c}`.
pub struct LogFunction {
    pub coords: Coordinates,
    pub terms: Vec<LogTerm>,
    pub e2c: GaussianRational,
    base_derivatives: FxHashMap<(SymId, IndexLetter), Expr>,
}

impl LogFunction {
    pub fn new(mut coords: Coordinates, logs: Vec<(BigRational, &str, Expr)>, e2c: GaussianRational) -> Self {
        let mut terms = Vec::new();
        for (coeff, name, poly) in logs {
            let base = coords.table.weight_base(name);
            terms.push(LogTerm { coeff, base, poly });
        }
        let mut base_derivatives = FxHashMap::default();
        for term in &terms {
            for d in IndexLetter::all(coords.n) {
                let dq = term.poly.derive(&PolyRule { coords: &coords, d }).unwrap();
                base_derivatives.insert((term.base, d), dq);
            }
        }
        LogFunction { coords, terms, e2c, base_derivatives }
    }

    pub fn n(&self) -> usize {
        self.coords.n
    }

    fn first_derivative(&self, d: IndexLetter) -> Expr {
        let mut out = Expr::zero();
        for term in &self.terms {
            let dq = &self.base_derivatives[&(term.base, d)];
            let c = ParamPoly::constant(GaussianRational::from_real(term.coeff.clone()));
            out.add_assign_ref(&dq.mul_weight(term.base, AffineExponent::int(-1)).scale(&c));
        }
        out
    }

    pub fn apply(&self, e: &Expr, d: IndexLetter) -> Expr {
        e.derive(&Rule { f: self, d }).unwrap()
    }

    /// `f_w` for every canonical word of length `1..=max_len`.
    pub fn jets(&self, max_len: usize) -> BTreeMap<Word, Expr> {
        let mut out: BTreeMap<Word, Expr> = BTreeMap::new();
        for d in IndexLetter::all(self.n()) {
            out.insert(Word::from_slice(&[d]), self.first_derivative(d));
        }
        for len in 2..=max_len {
            for w in canonical_words(self.n(), len) {
                // canonical words are closed under dropping the last letter
                let (last, head) = w.split_last().unwrap();
                let prev = &out[&Word::from_slice(head)];
                let value = self.apply(prev, *last);
                out.insert(w, value);
            }
        }
        out
    }

    /// `e^{2f}`; every `2 a_k` must be an integer.
    pub fn e2f(&self) -> Result<Expr, ClosedFormError> {
        let mut out = Expr::scalar(self.e2c.clone());
        for term in &self.terms {
            let twice = &term.coeff + &term.coeff;
            if !twice.is_integer() {
                return Err(ClosedFormError::NonIntegralWeight);
            }
            let k: i64 = twice.to_integer().try_into().map_err(|_| ClosedFormError::NonIntegralWeight)?;
            out = out.mul_weight(term.base, AffineExponent::int(k));
        }
        Ok(out)
    }

    pub fn eval(&self, e: &Expr, p: &HPoint) -> Result<GaussianRational, ClosedFormError> {
        let vals = self.coords.values(p);
        let mut bases = FxHashMap::default();
        for term in &self.terms {
            let v = term
                .poly
                .eval_exact(&|s| vals[&s].clone(), &|_| GaussianRational::one())
                .map_err(|_| ClosedFormError::Internal("coordinate polynomial"))?;
            if v.is_zero() {
                return Err(ClosedFormError::SingularPoint);
            }
            bases.insert(term.base, v);
        }
        e.eval_exact(&|s| vals[&s].clone(), &|b| bases[&b].clone()).map_err(|_| ClosedFormError::SingularPoint)
    }

    /// Exact values of all canonical jets up to order 3 at `p`.
    pub fn jet_values(&self, p: &HPoint) -> Result<JetValues, ClosedFormError> {
        let mut values = BTreeMap::new();
        for (w, e) in self.jets(3) {
            values.insert(w, self.eval(&e, p)?);
        }
        let e2f = self.eval(&self.e2f()?, p)?;
        Ok(JetValues { n: self.n(), values, e2f })
    }
}

/// Exact jets at one point.
#[derive(Clone, Debug)]
pub struct JetValues {
    pub n: usize,
    pub values: BTreeMap<Word, GaussianRational>,
    pub e2f: GaussianRational,
}

impl JetValues {
    /// `f_w` for an arbitrary word, reordered with the commutator.
    pub fn get(&self, w: &[IndexLetter]) -> GaussianRational {
        let mut out = GaussianRational::zero();
        for (cw, c) in canonicalize_letters(w) {
            out += &(&c * &self.values[&cw]);
        }
        out
    }

    pub fn grad_sq(&self) -> GaussianRational {
        (1..=self.n as u8).map(|a| &self.get(&[IndexLetter::Holo(a)]) * &self.get(&[IndexLetter::Anti(a)])).fold(
            GaussianRational::zero(),
            |mut acc, x| {
                acc += &x;
                acc
            },
        )
    }

    /// `g = |∂f|² + e^{2f} − i f_0`
    pub fn g(&self) -> GaussianRational {
        &(&self.grad_sq() + &self.e2f) - &self.get(&[IndexLetter::T]).mul_i()
    }
}
