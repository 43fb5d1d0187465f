//! Unnormalized expression trees and their canonical polynomial form.

use super::expr::Expr;
use super::param::Param;
use super::rational::GaussianRational;
use super::symbol::{AtomKind, SymbolTable};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Symbol(String),
    Scalar(GaussianRational),
    Param(Param),
    Add(Vec<RawExpr>),
    Mul(Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Pow(Box<RawExpr>, u32),
}

impl RawExpr {
    pub fn sym(name: &str) -> Self {
        RawExpr::Symbol(name.to_string())
    }

    pub fn int(v: i64) -> Self {
        RawExpr::Scalar(GaussianRational::int(v))
    }

    pub fn sub(a: RawExpr, b: RawExpr) -> Self {
        RawExpr::Add(vec![a, RawExpr::Neg(Box::new(b))])
    }

    pub fn pow(a: RawExpr, k: u32) -> Self {
        RawExpr::Pow(Box::new(a), k)
    }
}

/// Expand a tree into its canonical sparse form.
pub fn poly_normalize(e: &RawExpr, table: &SymbolTable) -> Result<Expr, AlgebraError> {
    Ok(match e {
        RawExpr::Symbol(name) => {
            let id = table.lookup(name)?;
            if table.kind(id) != AtomKind::Symbol {
                return Err(AlgebraError::UnknownSymbol(name.clone()));
            }
            Expr::sym(id)
        }
        RawExpr::Scalar(c) => Expr::scalar(c.clone()),
        RawExpr::Param(p) => Expr::param(*p),
        RawExpr::Add(items) => {
            let mut acc = Expr::zero();
            for item in items {
                acc.add_assign_ref(&poly_normalize(item, table)?);
            }
            acc
        }
        RawExpr::Mul(items) => {
            let mut acc = Expr::one();
            for item in items {
                acc = acc.mul(&poly_normalize(item, table)?);
            }
            acc
        }
        RawExpr::Neg(inner) => poly_normalize(inner, table)?.neg(),
        RawExpr::Pow(inner, k) => poly_normalize(inner, table)?.pow(*k),
    })
}

/// The canonical form as a tree again; `None` if a term carries a weight base.
pub fn to_raw(e: &Expr, table: &SymbolTable) -> Option<RawExpr> {
    let mut terms = Vec::new();
    for (key, c) in e.sorted_terms() {
        if !key.weights.factors().is_empty() {
            return None;
        }
        let mut coeff = Vec::new();
        for (deg, v) in c.terms() {
            let mut factors = vec![RawExpr::Scalar(v.clone())];
            for p in Param::ALL {
                factors.push(RawExpr::pow(RawExpr::Param(p), deg[p.index()] as u32));
            }
            coeff.push(RawExpr::Mul(factors));
        }
        let mut factors = vec![RawExpr::Add(coeff)];
        for &(s, k) in key.mono.factors() {
            factors.push(RawExpr::pow(RawExpr::sym(table.name(s)), k));
        }
        terms.push(RawExpr::Mul(factors));
    }
    Some(RawExpr::Add(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        let mut t = SymbolTable::new();
        t.symbol("x");
        t.symbol("y");
        t
    }

    #[test]
    fn commutativity() {
        let e = RawExpr::sub(
            RawExpr::Mul(vec![RawExpr::sym("x"), RawExpr::sym("y")]),
            RawExpr::Mul(vec![RawExpr::sym("y"), RawExpr::sym("x")]),
        );
        assert!(poly_normalize(&e, &table()).unwrap().is_zero());
    }

    #[test]
    fn binomial() {
        let x = || RawExpr::sym("x");
        let y = || RawExpr::sym("y");
        let e = RawExpr::Add(vec![
            RawExpr::pow(RawExpr::Add(vec![x(), y()]), 2),
            RawExpr::Neg(Box::new(RawExpr::pow(x(), 2))),
            RawExpr::Neg(Box::new(RawExpr::Mul(vec![RawExpr::int(2), x(), y()]))),
            RawExpr::Neg(Box::new(RawExpr::pow(y(), 2))),
        ]);
        assert!(poly_normalize(&e, &table()).unwrap().is_zero());
    }

    #[test]
    fn parameter_algebra() {
        let e = RawExpr::Add(vec![
            RawExpr::sub(RawExpr::int(1), RawExpr::Param(Param::M)),
            RawExpr::Param(Param::M),
        ]);
        assert_eq!(poly_normalize(&e, &table()).unwrap(), Expr::one());
    }

    #[test]
    fn unregistered_symbol() {
        let e = RawExpr::sym("w");
        assert_eq!(poly_normalize(&e, &table()), Err(AlgebraError::UnknownSymbol("w".into())));
    }
}
