//! Sparse polynomials with weight factors.
//!
//! An [`Expr`] is a finite sum of terms `c · x₁^{k₁}⋯x_r^{k_r} · B₁^{p₁}⋯B_s^{p_s}` where the
//! coefficient `c` is a [`ParamPoly`], the `x` are polynomial symbols and the `B` are weight
//! bases carrying [`AffineExponent`]s. Weight exponents add on multiplication.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::fmt;

use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::exponent::AffineExponent;
use super::param::{small_rational, Param, ParamPoly};
use super::rational::GaussianRational;
use super::symbol::{SymId, SymbolTable};
use super::AlgebraError;

/// Product of symbols with positive powers, sorted by symbol id.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(SymId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(s: SymId) -> Self {
        Monomial(smallvec::smallvec![(s, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, k)| k).sum()
    }

    pub fn factors(&self) -> &[(SymId, u32)] {
        &self.0
    }

    pub fn power_of(&self, s: SymId) -> u32 {
        self.0.iter().find(|(x, _)| *x == s).map_or(0, |&(_, k)| k)
    }

    /// Split off every power of `s`.
    pub fn split_off(&self, s: SymId) -> (Monomial, u32) {
        let k = self.power_of(s);
        (Monomial(self.0.iter().filter(|(x, _)| *x != s).copied().collect()), k)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.0.is_empty() {
            return other.clone();
        }
        if other.0.is_empty() {
            return self.clone();
        }
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ka) = self.0[i];
            let (b, kb) = other.0[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    out.push((a, ka));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, kb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ka + kb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// The monomial with one power of `s` removed. `s` must divide it.
    fn lower(&self, s: SymId) -> Monomial {
        let mut out = self.clone();
        let pos = out.0.iter().position(|(x, _)| *x == s).expect("symbol divides monomial");
        if out.0[pos].1 == 1 {
            out.0.remove(pos);
        } else {
            out.0[pos].1 -= 1;
        }
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0).then_with(|| self.degree().cmp(&other.degree()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product of weight factors, sorted by base id, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Weights(SmallVec<[(SymId, AffineExponent); 2]>);

impl Weights {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(base: SymId, e: AffineExponent) -> Self {
        let mut w = Self::one();
        w.set(base, e);
        w
    }

    pub fn factors(&self) -> &[(SymId, AffineExponent)] {
        &self.0
    }

    pub fn exponent_of(&self, base: SymId) -> AffineExponent {
        self.0.iter().find(|(b, _)| *b == base).map_or(AffineExponent::zero(), |&(_, e)| e)
    }

    fn set(&mut self, base: SymId, e: AffineExponent) {
        match self.0.binary_search_by(|(b, _)| b.cmp(&base)) {
            Ok(pos) => {
                if e.is_zero() {
                    self.0.remove(pos);
                } else {
                    self.0[pos].1 = e;
                }
            }
            Err(pos) => {
                if !e.is_zero() {
                    self.0.insert(pos, (base, e));
                }
            }
        }
    }

    fn shifted(&self, base: SymId, delta: AffineExponent) -> Weights {
        let mut out = self.clone();
        out.set(base, self.exponent_of(base) + delta);
        out
    }

    pub fn mul(&self, other: &Weights) -> Weights {
        if other.0.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for &(b, e) in &other.0 {
            out.set(b, out.exponent_of(b) + e);
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct TermKey {
    pub mono: Monomial,
    pub weights: Weights,
}

impl TermKey {
    pub fn one() -> Self {
        Self::default()
    }

    fn mul(&self, other: &TermKey) -> TermKey {
        TermKey { mono: self.mono.mul(&other.mono), weights: self.weights.mul(&other.weights) }
    }
}

/// Rules for a derivation `D`: its action on each symbol and on each weight base.
pub trait Derivation {
    type Error;
    fn symbol(&self, s: SymId) -> Result<Expr, Self::Error>;
    fn base(&self, b: SymId) -> Result<Expr, Self::Error>;
}

/// Numeric evaluation environment.
pub struct EvalEnv<'a> {
    pub symbol: &'a dyn Fn(SymId) -> Complex64,
    /// Value of a (positive real) weight base.
    pub base: &'a dyn Fn(SymId) -> f64,
    pub params: [f64; 3],
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Expr {
    terms: FxHashMap<TermKey, ParamPoly>,
}

impl Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(ParamPoly::one())
    }

    pub fn constant(c: ParamPoly) -> Self {
        Self::term(TermKey::one(), c)
    }

    pub fn scalar(c: GaussianRational) -> Self {
        Self::constant(ParamPoly::constant(c))
    }

    pub fn int(v: i64) -> Self {
        Self::scalar(GaussianRational::int(v))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::scalar(GaussianRational::frac(num, den))
    }

    pub fn i() -> Self {
        Self::scalar(GaussianRational::i())
    }

    pub fn param(p: Param) -> Self {
        Self::constant(ParamPoly::param(p))
    }

    pub fn sym(s: SymId) -> Self {
        Self::term(TermKey { mono: Monomial::var(s), weights: Weights::one() }, ParamPoly::one())
    }

    pub fn weight(base: SymId, e: AffineExponent) -> Self {
        Self::term(TermKey { mono: Monomial::one(), weights: Weights::single(base, e) }, ParamPoly::one())
    }

    pub fn term(key: TermKey, c: ParamPoly) -> Self {
        let mut e = Self::zero();
        e.add_term(key, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &ParamPoly)> {
        self.terms.iter()
    }

    /// Terms in canonical order.
    pub fn sorted_terms(&self) -> Vec<(&TermKey, &ParamPoly)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// The smallest term in canonical order, if any.
    pub fn leading_term(&self) -> Option<(&TermKey, &ParamPoly)> {
        self.terms.iter().min_by(|a, b| a.0.cmp(b.0))
    }

    pub fn add_term(&mut self, key: TermKey, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Expr) {
        self.terms.reserve(other.terms.len());
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Expr) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.neg());
        }
    }

    /// `self += c · key · other`.
    fn add_product(&mut self, c: &ParamPoly, key: &TermKey, other: &Expr) {
        for (k2, c2) in &other.terms {
            self.add_term(key.mul(k2), c.mul(c2));
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let (mut big, small) =
            if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        big.add_assign_ref(small);
        big
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        out.sub_assign_ref(other);
        out
    }

    pub fn neg(&self) -> Expr {
        Expr { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        out.terms.reserve(self.len().saturating_mul(other.len()).min(1 << 20));
        let (outer, inner) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        for (k, c) in &outer.terms {
            out.add_product(c, k, inner);
        }
        out
    }

    pub fn scale(&self, c: &ParamPoly) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        let mut out = Expr::zero();
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.mul(c));
        }
        out
    }

    pub fn scale_scalar(&self, c: &GaussianRational) -> Expr {
        self.scale(&ParamPoly::constant(c.clone()))
    }

    pub fn mul_weight(&self, base: SymId, e: AffineExponent) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    (TermKey { mono: k.mono.clone(), weights: k.weights.shifted(base, e) }, c.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn contains_symbol(&self, s: SymId) -> bool {
        self.terms.keys().any(|k| k.mono.power_of(s) > 0)
    }

    pub fn symbols(&self) -> Vec<SymId> {
        let mut v: Vec<SymId> =
            self.terms.keys().flat_map(|k| k.mono.factors().iter().map(|&(s, _)| s)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Apply a derivation with the Leibniz rule.
    pub fn derive<D: Derivation>(&self, d: &D) -> Result<Expr, D::Error> {
        let mut sym_cache: FxHashMap<SymId, Expr> = FxHashMap::default();
        let mut base_cache: FxHashMap<SymId, Expr> = FxHashMap::default();
        let mut out = Expr::zero();
        for (key, c) in &self.terms {
            for &(s, k) in key.mono.factors() {
                let ds = match sym_cache.entry(s) {
                    Entry::Occupied(o) => o.into_mut(),
                    Entry::Vacant(v) => v.insert(d.symbol(s)?),
                };
                if ds.is_zero() {
                    continue;
                }
                let rest = TermKey { mono: key.mono.lower(s), weights: key.weights.clone() };
                out.add_product(&c.scale(&GaussianRational::int(k as i64)), &rest, ds);
            }
            for &(b, p) in key.weights.factors() {
                let db = match base_cache.entry(b) {
                    Entry::Occupied(o) => o.into_mut(),
                    Entry::Vacant(v) => v.insert(d.base(b)?),
                };
                if db.is_zero() {
                    continue;
                }
                let rest = TermKey {
                    mono: key.mono.clone(),
                    weights: key.weights.shifted(b, AffineExponent::int(-1)),
                };
                out.add_product(&c.mul(&ParamPoly::from(&p)), &rest, db);
            }
        }
        Ok(out)
    }

    /// Transform coefficients and substitute symbols. Symbols mapped to `None` are kept.
    /// Weight factors are left untouched.
    pub fn map_atoms(
        &self,
        coeff: impl Fn(&ParamPoly) -> ParamPoly,
        sym: impl Fn(SymId) -> Option<Expr>,
    ) -> Expr {
        let mut powers: FxHashMap<(SymId, u32), Option<Expr>> = FxHashMap::default();
        let mut out = Expr::zero();
        for (key, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = Expr::term(
                TermKey { mono: Monomial::one(), weights: key.weights.clone() },
                coeff(c),
            );
            for &(s, k) in key.mono.factors() {
                let p = powers.entry((s, k)).or_insert_with(|| sym(s).map(|e| e.pow(k)));
                match p {
                    Some(e) => acc = acc.mul(e),
                    None => kept = kept.mul(&Monomial(smallvec::smallvec![(s, k)])),
                }
            }
            if kept.is_one() {
                out.add_assign_ref(&acc);
            } else {
                let kept_key = TermKey { mono: kept, weights: Weights::one() };
                out.add_product(&ParamPoly::one(), &kept_key, &acc);
            }
        }
        out
    }

    /// Complex conjugation of coefficients only.
    pub fn conj_coefficients(&self) -> Expr {
        Expr { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect() }
    }

    /// Substitute a rational value for a parameter, in coefficients and weight exponents.
    pub fn substitute_param(&self, p: Param, value: &BigRational) -> Expr {
        let small = small_rational(value);
        let mut out = Expr::zero();
        for (key, c) in &self.terms {
            let mut weights = Weights::one();
            for &(b, e) in key.weights.factors() {
                let e = match small {
                    Some(v) => e.substitute(p, v),
                    None => {
                        assert!(e.slopes[p.index()] == Rational64::from_integer(0), "parameter value too large");
                        e
                    }
                };
                weights.set(b, e);
            }
            out.add_term(TermKey { mono: key.mono.clone(), weights }, c.substitute(p, value));
        }
        out
    }

    /// An expression that vanishes exactly when `self` does, in which every power of
    /// `base` has been reduced to a residue class exponent with constant part in `[0, 1)`.
    ///
    /// `base` must equal `definition`, a weight-free polynomial in the other atoms.
    /// Within each residue class of exponents the lowest integer power is divided out
    /// and the remaining nonnegative integer powers are expanded from `definition`.
    pub fn cleared_for_zero_test(&self, base: SymId, definition: &Expr) -> Expr {
        let mut classes: FxHashMap<AffineExponent, i64> = FxHashMap::default();
        for key in self.terms.keys() {
            let (k, rest) = key.weights.exponent_of(base).split_integer();
            classes.entry(rest).and_modify(|m| *m = (*m).min(k)).or_insert(k);
        }
        let mut powers: Vec<Expr> = vec![Expr::one()];
        let mut out = Expr::zero();
        for (key, c) in &self.terms {
            let (k, rest) = key.weights.exponent_of(base).split_integer();
            let shift = (k - classes[&rest]) as usize;
            while powers.len() <= shift {
                let next = powers.last().unwrap().mul(definition);
                powers.push(next);
            }
            let mut weights = key.weights.clone();
            weights.set(base, rest);
            let stripped = TermKey { mono: key.mono.clone(), weights };
            out.add_product(c, &stripped, &powers[shift]);
        }
        out
    }

    /// Rewrite every `s^{2j+ε}` as `square^j · s^ε`, leaving `s` at most linear.
    pub fn reduce_square(&self, s: SymId, square: &Expr) -> Expr {
        let mut powers: Vec<Expr> = vec![Expr::one()];
        let mut out = Expr::zero();
        for (key, c) in &self.terms {
            let (mono, k) = key.mono.split_off(s);
            if k < 2 {
                out.add_term(key.clone(), c.clone());
                continue;
            }
            let j = (k / 2) as usize;
            while powers.len() <= j {
                let next = powers.last().unwrap().mul(square);
                powers.push(next);
            }
            let mono = if k % 2 == 1 { mono.mul(&Monomial::var(s)) } else { mono };
            let stripped = TermKey { mono, weights: key.weights.clone() };
            out.add_product(c, &stripped, &powers[j]);
        }
        out
    }

    /// Zero test for expressions carrying an abbreviated weight base.
    pub fn is_zero_modulo(&self, base: SymId, definition: &Expr) -> bool {
        self.is_zero() || self.cleared_for_zero_test(base, definition).is_zero()
    }

    pub fn eval(&self, env: &EvalEnv<'_>) -> Complex64 {
        self.terms
            .iter()
            .map(|(key, c)| {
                let mut v = c.eval(&env.params);
                for &(s, k) in key.mono.factors() {
                    v *= (env.symbol)(s).powu(k);
                }
                for &(b, e) in key.weights.factors() {
                    v *= (env.base)(b).powf(e.eval(&env.params));
                }
                v
            })
            .sum()
    }

    /// Exact evaluation; every coefficient must be parameter-free and every weight
    /// exponent an integer.
    pub fn eval_exact(
        &self,
        symbol: &dyn Fn(SymId) -> GaussianRational,
        base: &dyn Fn(SymId) -> GaussianRational,
    ) -> Result<GaussianRational, AlgebraError> {
        let mut total = GaussianRational::zero();
        let mut sym_pow: FxHashMap<(SymId, u32), GaussianRational> = FxHashMap::default();
        let mut base_pow: FxHashMap<(SymId, i64), GaussianRational> = FxHashMap::default();
        for (key, c) in &self.terms {
            let mut v = c.as_constant().ok_or(AlgebraError::NotNumeric)?;
            for &(s, k) in key.mono.factors() {
                let p = sym_pow.entry((s, k)).or_insert_with(|| symbol(s).pow(k));
                v = &v * p;
            }
            for &(b, e) in key.weights.factors() {
                let k = e.as_integer().ok_or(AlgebraError::NotNumeric)?;
                let p = match base_pow.entry((b, k)) {
                    Entry::Occupied(o) => o.into_mut(),
                    Entry::Vacant(slot) => slot.insert(base(b).powi(k)?),
                };
                v = &v * p;
            }
            total += &v;
        }
        Ok(total)
    }

    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, table }
    }
}

pub fn display_term(key: &TermKey, c: &ParamPoly, table: &SymbolTable) -> String {
    let mut factors: Vec<String> = Vec::new();
    for &(s, k) in key.mono.factors() {
        if k == 1 {
            factors.push(table.name(s).to_string());
        } else {
            factors.push(format!("{}^{}", table.name(s), k));
        }
    }
    for &(b, e) in key.weights.factors() {
        if e == AffineExponent::int(1) {
            factors.push(table.name(b).to_string());
        } else {
            factors.push(format!("{}^({})", table.name(b), e));
        }
    }
    let coeff = c.to_string();
    let coeff = if c.terms().count() > 1 || coeff.contains(['+', ' ']) && !coeff.starts_with('(') {
        format!("({coeff})")
    } else {
        coeff
    };
    if factors.is_empty() {
        coeff
    } else if c == &ParamPoly::one() {
        factors.join("·")
    } else {
        format!("{}·{}", coeff, factors.join("·"))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    table: &'a SymbolTable,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .expr
            .sorted_terms()
            .into_iter()
            .map(|(k, c)| display_term(k, c, self.table))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self.add_assign_ref(&rhs);
        self
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self.sub_assign_ref(&rhs);
        self
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(&self, &rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc.add_assign_ref(&e);
        }
        acc
    }
}

/// Exponent helper for frequently used rational constants.
pub fn exp_frac(num: i64, den: i64) -> AffineExponent {
    AffineExponent::constant(Rational64::new(num, den))
}
