//! Fractions over a fixed registry of nonzero denominator factors.

use std::collections::BTreeMap;

use super::expr::Expr;
use super::param::ParamPoly;

pub type FactorId = usize;

/// Named polynomials known to be nonzero; they are the only admissible denominators.
#[derive(Clone, Debug, Default)]
pub struct FactorTable {
    factors: Vec<(String, Expr)>,
}

impl FactorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, poly: Expr) -> FactorId {
        self.factors.push((name.to_string(), poly));
        self.factors.len() - 1
    }

    pub fn poly(&self, id: FactorId) -> &Expr {
        &self.factors[id].1
    }

    pub fn name(&self, id: FactorId) -> &str {
        &self.factors[id].0
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    fn product(&self, den: &BTreeMap<FactorId, u32>) -> Expr {
        let mut acc = Expr::one();
        for (&id, &k) in den {
            acc = acc.mul(&self.poly(id).pow(k));
        }
        acc
    }
}

/// `num / Π factor^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frac {
    pub num: Expr,
    pub den: BTreeMap<FactorId, u32>,
}

impl Frac {
    pub fn from_expr(num: Expr) -> Self {
        Frac { num, den: BTreeMap::new() }
    }

    pub fn over(num: Expr, factor: FactorId) -> Self {
        Frac { num, den: BTreeMap::from([(factor, 1)]) }
    }

    pub fn zero() -> Self {
        Frac::from_expr(Expr::zero())
    }

    pub fn one() -> Self {
        Frac::from_expr(Expr::one())
    }

    fn lift(&self, target: &BTreeMap<FactorId, u32>, table: &FactorTable) -> Expr {
        let mut missing = BTreeMap::new();
        for (&id, &k) in target {
            let have = self.den.get(&id).copied().unwrap_or(0);
            if k > have {
                missing.insert(id, k - have);
            }
        }
        if missing.is_empty() {
            self.num.clone()
        } else {
            self.num.mul(&table.product(&missing))
        }
    }

    pub fn add(&self, other: &Frac, table: &FactorTable) -> Frac {
        let mut den = self.den.clone();
        for (&id, &k) in &other.den {
            let e = den.entry(id).or_insert(0);
            *e = (*e).max(k);
        }
        let num = self.lift(&den, table).add(&other.lift(&den, table));
        Frac { num, den }
    }

    pub fn sub(&self, other: &Frac, table: &FactorTable) -> Frac {
        self.add(&other.neg(), table)
    }

    pub fn neg(&self) -> Frac {
        Frac { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Frac) -> Frac {
        let mut den = self.den.clone();
        for (&id, &k) in &other.den {
            *den.entry(id).or_insert(0) += k;
        }
        Frac { num: self.num.mul(&other.num), den }
    }

    pub fn mul_expr(&self, e: &Expr) -> Frac {
        Frac { num: self.num.mul(e), den: self.den.clone() }
    }

    pub fn scale(&self, c: &ParamPoly) -> Frac {
        Frac { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Apply a map to the numerator; valid for maps that fix every registered factor
    /// (for instance conjugation when every factor is real).
    pub fn map_num(&self, f: impl FnOnce(&Expr) -> Expr) -> Frac {
        Frac { num: f(&self.num), den: self.den.clone() }
    }
}

/// A fraction vanishes iff its numerator normalizes to zero; the denominators are
/// nonzero by construction.
pub fn rational_is_zero(num: &Expr, _denominators: &[Expr]) -> bool {
    num.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::param::Param;
    use crate::algebra::symbol::SymbolTable;

    #[test]
    fn is_zero_examples() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(t.symbol("x"));
        let m = Expr::param(Param::M);
        assert!(rational_is_zero(&Expr::zero(), &[x.clone()]));
        assert!(rational_is_zero(&(&(&m * &x) - &(&m * &x)), &[x.clone()]));
        assert!(!rational_is_zero(&x, &[]));
    }

    #[test]
    fn common_denominator() {
        let mut t = SymbolTable::new();
        let x = Expr::sym(t.symbol("x"));
        let y = Expr::sym(t.symbol("y"));
        let mut ft = FactorTable::new();
        let fx = ft.register("x", x.clone());
        let fy = ft.register("y", y.clone());
        // 1/x + 1/y - (x + y)/(xy) = 0
        let a = Frac::over(Expr::one(), fx);
        let b = Frac::over(Expr::one(), fy);
        let c = Frac::over(&x + &y, fx).mul(&Frac::over(Expr::one(), fy));
        let r = a.add(&b, &ft).sub(&c, &ft);
        assert!(r.num.is_zero());
    }
}
