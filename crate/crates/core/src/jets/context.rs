//! Jets of a solution of the CR Yamabe-type equation and of auxiliary functions.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::algebra::{AffineExponent, Derivation, Expr, GaussianRational, ParamPoly, SymId, SymbolTable};

use super::canon::canonicalize_letters;
use super::letter::{canonical_words, word_to_string, IndexLetter, Word};
use super::JetError;

/// Functions whose jets the context knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    /// The solution. Its value only enters through the weight `e^f`.
    F,
    /// A real test function, jets of order 0 and 1.
    Phi,
    /// A positive real function, first jets only. Its value is the weight base `η`.
    Eta,
}

impl Field {
    pub fn max_order(self) -> usize {
        match self {
            Field::F => 3,
            Field::Phi | Field::Eta => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::F => "f",
            Field::Phi => "φ",
            Field::Eta => "η",
        }
    }
}

/// Immutable after construction, so it can be shared across threads.
pub struct CRContext {
    n: usize,
    table: SymbolTable,
    ids: FxHashMap<(Field, Word), SymId>,
    jets: Vec<Option<(Field, Word)>>,
    reduced: FxHashMap<Word, Expr>,
    deriv: FxHashMap<(SymId, IndexLetter), Expr>,
    conj: FxHashMap<SymId, Expr>,
    dh: FxHashMap<IndexLetter, Expr>,
    e_base: SymId,
    h_base: SymId,
    eta_base: SymId,
    h_def: Expr,
}

struct TableRule<'a> {
    ctx: &'a CRContext,
    d: IndexLetter,
}

impl Derivation for TableRule<'_> {
    type Error = JetError;

    fn symbol(&self, s: SymId) -> Result<Expr, JetError> {
        self.ctx
            .deriv
            .get(&(s, self.d))
            .cloned()
            .ok_or_else(|| JetError::JetOrderOverflow(self.ctx.table.name(s).to_string()))
    }

    fn base(&self, b: SymId) -> Result<Expr, JetError> {
        let ctx = self.ctx;
        if b == ctx.e_base {
            Ok(ctx.plain(Field::F, &[self.d]).mul_weight(b, AffineExponent::int(1)))
        } else if b == ctx.eta_base {
            Ok(ctx.plain(Field::Eta, &[self.d]))
        } else if b == ctx.h_base {
            ctx.dh.get(&self.d).cloned().ok_or_else(|| JetError::JetOrderOverflow("h".into()))
        } else {
            Err(JetError::Unknown(ctx.table.name(b).to_string()))
        }
    }
}

impl CRContext {
    pub fn new(n: usize) -> Result<Self, JetError> {
        if !(1..=9).contains(&n) {
            return Err(JetError::UnsupportedDimension(n));
        }
        let mut table = SymbolTable::new();
        let mut ids = FxHashMap::default();
        let mut jets = Vec::new();
        let mut register = |table: &mut SymbolTable, field: Field, w: Word| {
            let name = if w.is_empty() {
                field.name().to_string()
            } else {
                format!("{}_{{{}}}", field.name(), word_to_string(&w))
            };
            let id = table.symbol(&name);
            jets.resize(id.0 as usize + 1, None);
            jets[id.0 as usize] = Some((field, w.clone()));
            ids.insert((field, w), id);
        };
        for len in 1..=3 {
            for w in canonical_words(n, len) {
                register(&mut table, Field::F, w);
            }
        }
        register(&mut table, Field::Phi, Word::new());
        for w in canonical_words(n, 1) {
            register(&mut table, Field::Phi, w);
        }
        for w in canonical_words(n, 1) {
            register(&mut table, Field::Eta, w);
        }
        let e_base = table.weight_base("e^f");
        let h_base = table.weight_base("h");
        let eta_base = table.weight_base("η");
        jets.resize(table.len(), None);

        let mut ctx = CRContext {
            n,
            table,
            ids,
            jets,
            reduced: FxHashMap::default(),
            deriv: FxHashMap::default(),
            conj: FxHashMap::default(),
            dh: FxHashMap::default(),
            e_base,
            h_base,
            eta_base,
            h_def: Expr::zero(),
        };
        let s = ctx.grad_sq().add(&ctx.e(2));
        let f0 = ctx.plain(Field::F, &[IndexLetter::T]);
        ctx.h_def = s.mul(&s).add(&f0.mul(&f0));
        ctx.fill_tables()?;
        Ok(ctx)
    }

    fn fill_tables(&mut self) -> Result<(), JetError> {
        let n = self.n as u8;
        let (hn, an) = (IndexLetter::Holo(n), IndexLetter::Anti(n));
        let letters = IndexLetter::all(self.n);

        // Σ_α f_{αᾱ} = −n g
        let mut trace = self.g().scale(&ParamPoly::int(-(self.n as i64)));
        for a in 1..n {
            trace.sub_assign_ref(&self.plain(Field::F, &[IndexLetter::Holo(a), IndexLetter::Anti(a)]));
        }
        self.reduced.insert(Word::from_slice(&[hn, an]), trace.clone());

        // Third-order reductions and second-order derivatives depend on each other in a
        // triangular way; retry until everything is filled.
        enum Task {
            Deriv(SymId),
            Reduce(IndexLetter),
        }
        let mut pending: Vec<Task> = Vec::new();
        for len in 1..=2 {
            for w in canonical_words(self.n, len) {
                pending.push(Task::Deriv(self.ids[&(Field::F, w)]));
            }
        }
        pending.push(Task::Deriv(self.ids[&(Field::Phi, Word::new())]));
        pending.extend(letters.iter().map(|&d| Task::Reduce(d)));
        while !pending.is_empty() {
            let before = pending.len();
            let mut last_err = None;
            let mut rest = Vec::new();
            for task in pending {
                let done = match &task {
                    Task::Deriv(s) => self.fill_symbol_derivatives(*s, &letters),
                    Task::Reduce(d) => self.fill_reduction(&trace, *d),
                };
                if let Err(e) = done {
                    last_err = Some(e);
                    rest.push(task);
                }
            }
            if rest.len() == before {
                return Err(last_err.unwrap());
            }
            pending = rest;
        }

        for d in &letters {
            let dh = self.h_def.derive(&TableRule { ctx: self, d: *d })?;
            self.dh.insert(*d, dh);
        }

        let all: Vec<SymId> = self.jets.iter().enumerate().filter(|(_, j)| j.is_some()).map(|(i, _)| SymId(i as u32)).collect();
        for s in all {
            let (field, w) = self.jets[s.0 as usize].clone().unwrap();
            let bar: Word = w.iter().map(|l| l.bar()).collect();
            let value = self.combination(field, &canonicalize_letters(&bar))?;
            self.conj.insert(s, value);
        }
        Ok(())
    }

    fn fill_symbol_derivatives(&mut self, s: SymId, letters: &[IndexLetter]) -> Result<(), JetError> {
        let (field, w) = self.jets[s.0 as usize].clone().unwrap();
        let mut values = Vec::with_capacity(letters.len());
        for d in letters {
            let mut word = w.clone();
            word.push(*d);
            values.push(self.combination(field, &canonicalize_letters(&word))?);
        }
        for (d, v) in letters.iter().zip(values) {
            self.deriv.insert((s, *d), v);
        }
        Ok(())
    }

    /// `f_{n n̄ d}` from the derivative of the trace equation.
    fn fill_reduction(&mut self, trace: &Expr, d: IndexLetter) -> Result<(), JetError> {
        let n = self.n as u8;
        let word = Word::from_slice(&[IndexLetter::Holo(n), IndexLetter::Anti(n), d]);
        let mut target = word.clone();
        target.sort();
        let mut value = trace.derive(&TableRule { ctx: self, d })?;
        for (w, c) in canonicalize_letters(&word) {
            if w == target {
                debug_assert!(c.is_one());
                continue;
            }
            value.sub_assign_ref(&self.reduce(Field::F, &w)?.scale_scalar(&c));
        }
        self.reduced.insert(target, value);
        Ok(())
    }

    fn combination(&self, field: Field, combo: &BTreeMap<Word, GaussianRational>) -> Result<Expr, JetError> {
        let mut out = Expr::zero();
        for (w, c) in combo {
            out.add_assign_ref(&self.reduce(field, w)?.scale_scalar(c));
        }
        Ok(out)
    }

    /// Reduced form of a canonical jet.
    fn reduce(&self, field: Field, w: &Word) -> Result<Expr, JetError> {
        if field == Field::F {
            if w.is_empty() {
                return Err(JetError::BareValue);
            }
            if let Some(r) = self.reduced.get(w) {
                return Ok(r.clone());
            }
            if self.is_eliminable(w) {
                return Err(JetError::JetOrderOverflow(word_to_string(w)));
            }
        }
        if field == Field::Eta && w.is_empty() {
            return Ok(self.eta(AffineExponent::int(1)));
        }
        self.ids
            .get(&(field, w.clone()))
            .map(|&id| Expr::sym(id))
            .ok_or_else(|| JetError::JetOrderOverflow(format!("{}_{{{}}}", field.name(), word_to_string(w))))
    }

    fn is_eliminable(&self, w: &[IndexLetter]) -> bool {
        let n = self.n as u8;
        w.contains(&IndexLetter::Holo(n)) && w.contains(&IndexLetter::Anti(n))
    }

    fn plain(&self, field: Field, w: &[IndexLetter]) -> Expr {
        Expr::sym(self.ids[&(field, Word::from_slice(w))])
    }

    fn check_word(&self, w: &[IndexLetter]) -> Result<(), JetError> {
        match w.iter().find(|l| !l.is_valid_for(self.n)) {
            Some(l) => Err(JetError::InvalidLetter(l.to_string(), self.n)),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn letters(&self) -> Vec<IndexLetter> {
        IndexLetter::all(self.n)
    }

    /// The jet `field_{w}` as a combination of canonical jets, without eliminating the trace.
    pub fn canonicalize_word(&self, field: Field, w: &[IndexLetter]) -> Result<Expr, JetError> {
        self.check_word(w)?;
        if w.len() > field.max_order() {
            return Err(JetError::JetOrderOverflow(format!("{}_{{{}}}", field.name(), word_to_string(w))));
        }
        let mut out = Expr::zero();
        for (cw, c) in canonicalize_letters(w) {
            let term = match self.ids.get(&(field, cw.clone())) {
                Some(&id) => Expr::sym(id),
                None => self.reduce(field, &cw)?,
            };
            out.add_assign_ref(&term.scale_scalar(&c));
        }
        Ok(out)
    }

    /// The jet `field_{w}` in reduced form.
    pub fn jet(&self, field: Field, w: &[IndexLetter]) -> Result<Expr, JetError> {
        self.check_word(w)?;
        if w.len() > field.max_order() {
            return Err(JetError::JetOrderOverflow(format!("{}_{{{}}}", field.name(), word_to_string(w))));
        }
        self.combination(field, &canonicalize_letters(w))
    }

    /// Shorthand for jets of the solution.
    pub fn f(&self, w: &[IndexLetter]) -> Expr {
        self.jet(Field::F, w).expect("valid jet of f")
    }

    pub fn symbol_of(&self, field: Field, w: &[IndexLetter]) -> Option<SymId> {
        self.ids.get(&(field, Word::from_slice(w))).copied()
    }

    pub fn jet_of_symbol(&self, s: SymId) -> Option<(Field, &Word)> {
        self.jets.get(s.0 as usize).and_then(|j| j.as_ref()).map(|(f, w)| (*f, w))
    }

    /// Whether a canonical jet of `f` is replaced by the trace equation.
    pub fn is_eliminated(&self, s: SymId) -> bool {
        matches!(self.jet_of_symbol(s), Some((Field::F, w)) if self.is_eliminable(w))
    }

    /// Substitute the trace equation (and its derivatives) for every eliminable jet.
    pub fn eliminate_trace(&self, e: &Expr) -> Expr {
        e.map_atoms(
            |c| c.clone(),
            |s| match self.jet_of_symbol(s) {
                Some((Field::F, w)) if self.is_eliminable(w) => Some(self.reduced[w].clone()),
                _ => None,
            },
        )
    }

    /// Apply `Z_α`, `Z_ᾱ` or `∂_t` to a reduced expression.
    pub fn apply_derivation(&self, e: &Expr, d: IndexLetter) -> Result<Expr, JetError> {
        self.check_word(&[d])?;
        let e = self.eliminate_trace(e);
        e.derive(&TableRule { ctx: self, d })
    }

    /// Complex conjugate; every field is real.
    pub fn conjugate(&self, e: &Expr) -> Expr {
        e.map_atoms(|c| c.conj(), |s| self.conj.get(&s).cloned())
    }

    pub fn real_part(&self, e: &Expr) -> Expr {
        e.add(&self.conjugate(e)).scale(&ParamPoly::frac(1, 2))
    }

    pub fn imag_part(&self, e: &Expr) -> Expr {
        e.sub(&self.conjugate(e)).scale(&ParamPoly::constant(GaussianRational::frac(-1, 2).mul_i()))
    }

    /// `|X|² = X · conj(X)`.
    pub fn norm_sq(&self, e: &Expr) -> Expr {
        e.mul(&self.conjugate(e))
    }

    /// `Re Σ_α Z_ᾱ V_α`.
    pub fn divergence_real(&self, v: &[Expr]) -> Result<Expr, JetError> {
        if v.len() != self.n {
            return Err(JetError::InvalidLetter(format!("vector of length {}", v.len()), self.n));
        }
        let mut s = Expr::zero();
        for (a, va) in v.iter().enumerate() {
            s.add_assign_ref(&self.apply_derivation(va, IndexLetter::Anti(a as u8 + 1))?);
        }
        Ok(self.real_part(&s))
    }

    /// Canonical form modulo `h = s² + f_0²`: every even power of `f_0` is traded for
    /// powers of `h − s²`, after which `h` is independent of the remaining atoms.
    pub fn normal_form(&self, e: &Expr) -> Expr {
        let s = self.grad_sq().add(&self.e(2));
        let square = self.h_pow(AffineExponent::int(1)).sub(&s.mul(&s));
        e.reduce_square(self.ids[&(Field::F, Word::from_slice(&[IndexLetter::T]))], &square)
    }

    /// Exact zero test that accounts for `h` being an abbreviation.
    pub fn is_zero(&self, e: &Expr) -> bool {
        e.is_zero() || self.normal_form(e).is_zero()
    }

    pub fn e_base(&self) -> SymId {
        self.e_base
    }

    pub fn h_base(&self) -> SymId {
        self.h_base
    }

    pub fn eta_base(&self) -> SymId {
        self.eta_base
    }

    /// `e^{kf}`.
    pub fn e(&self, k: i64) -> Expr {
        Expr::weight(self.e_base, AffineExponent::int(k))
    }

    pub fn e_pow(&self, p: AffineExponent) -> Expr {
        Expr::weight(self.e_base, p)
    }

    /// `h^p` with `h = |g|² = (|∂f|² + e^{2f})² + f_0²`.
    pub fn h_pow(&self, p: AffineExponent) -> Expr {
        Expr::weight(self.h_base, p)
    }

    pub fn h_def(&self) -> &Expr {
        &self.h_def
    }

    pub fn eta(&self, p: AffineExponent) -> Expr {
        Expr::weight(self.eta_base, p)
    }

    /// `|∂f|² = Σ_α f_α f_ᾱ`.
    pub fn grad_sq(&self) -> Expr {
        (1..=self.n as u8)
            .map(|a| self.plain(Field::F, &[IndexLetter::Holo(a)]).mul(&self.plain(Field::F, &[IndexLetter::Anti(a)])))
            .sum()
    }

    /// `g = |∂f|² + e^{2f} − i f_0`.
    pub fn g(&self) -> Expr {
        let f0 = self.plain(Field::F, &[IndexLetter::T]);
        self.grad_sq().add(&self.e(2)).sub(&f0.scale(&ParamPoly::i()))
    }
}
