//! Identity builders and the verification driver.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rayon::prelude::*;

use crate::algebra::{display_term, AffineExponent, Expr, Frac, Param, ParamPoly};
use crate::jets::{CRContext, Field, IndexLetter, JetError};

use super::catalog::{psi_squares_parts, Catalog};
use super::coeffs::TwistSign;
use super::psi::psi_squares_symbolic;
use super::QuantityError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Weighted,
    Unweighted,
    WeightDerivative,
    PsiSquares,
    GDerivativePair,
    TimeFlux,
    GradientFlux,
    PowerFlux,
    /// The step combining the m = 0 formula with the weight derivative.
    Combination,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::Weighted,
        IdentityId::Unweighted,
        IdentityId::WeightDerivative,
        IdentityId::PsiSquares,
        IdentityId::GDerivativePair,
        IdentityId::TimeFlux,
        IdentityId::GradientFlux,
        IdentityId::PowerFlux,
        IdentityId::Combination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Weighted => "lemma1",
            IdentityId::Unweighted => "unweighted",
            IdentityId::WeightDerivative => "weight-derivative",
            IdentityId::PsiSquares => "psi-squares",
            IdentityId::GDerivativePair => "g-derivative",
            IdentityId::TimeFlux => "time-flux",
            IdentityId::GradientFlux => "gradient-flux",
            IdentityId::PowerFlux => "power-flux",
            IdentityId::Combination => "combination",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = QuantityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| QuantityError::UnknownIdentity(s.to_string()))
    }
}

/// How the parameter `m` is treated.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum ParamMode {
    #[default]
    Formal,
    Rational(BigRational),
}

impl fmt::Display for ParamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamMode::Formal => f.write_str("formal"),
            ParamMode::Rational(r) => write!(f, "m={r}"),
        }
    }
}

/// A term of the right side of the weighted divergence identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightedTerm {
    Curvature,
    Tensor,
    Cross,
    C1,
    C4,
    C6,
}

impl WeightedTerm {
    pub const ALL: [WeightedTerm; 6] =
        [WeightedTerm::Curvature, WeightedTerm::Tensor, WeightedTerm::Cross, WeightedTerm::C1, WeightedTerm::C4, WeightedTerm::C6];

    pub fn name(self) -> &'static str {
        match self {
            WeightedTerm::Curvature => "e2f",
            WeightedTerm::Tensor => "tensor",
            WeightedTerm::Cross => "cross",
            WeightedTerm::C1 => "c1",
            WeightedTerm::C4 => "c4",
            WeightedTerm::C6 => "c6",
        }
    }
}

/// Deliberate corruption of the weighted identity, used to show the checker can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Replace `c_k` by `c_k + 1`.
    BumpCoefficient(usize),
    DropTerm(WeightedTerm),
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::BumpCoefficient(k) => write!(f, "c{k}+1"),
            Mutation::DropTerm(t) => write!(f, "drop:{}", t.name()),
        }
    }
}

impl FromStr for Mutation {
    type Err = QuantityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QuantityError::BadMutation(s.to_string());
        if let Some(term) = s.strip_prefix("drop:") {
            return WeightedTerm::ALL.into_iter().find(|t| t.name() == term).map(Mutation::DropTerm).ok_or_else(bad);
        }
        let k = s.strip_prefix('c').and_then(|r| r.strip_suffix("+1")).ok_or_else(bad)?;
        match k.parse::<usize>() {
            Ok(k @ 1..=6) => Ok(Mutation::BumpCoefficient(k)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResidualStatus {
    Zero,
    Nonzero { witness: String },
    Failed(String),
}

impl ResidualStatus {
    pub fn is_zero(&self) -> bool {
        matches!(self, ResidualStatus::Zero)
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub label: String,
    pub status: ResidualStatus,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub residual_terms: usize,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub mode: ParamMode,
    pub mutation: Option<Mutation>,
    pub sign: TwistSign,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub identity: IdentityId,
    pub n: usize,
    pub mode: ParamMode,
    pub mutation: Option<Mutation>,
    pub sign: TwistSign,
    pub checks: Vec<CheckOutcome>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.status.is_zero())
    }

    /// The first failing sub-check, if any.
    pub fn status(&self) -> ResidualStatus {
        self.checks.iter().map(|c| c.status.clone()).find(|s| !s.is_zero()).unwrap_or(ResidualStatus::Zero)
    }

    pub fn residual_terms(&self) -> usize {
        self.checks.iter().map(|c| c.residual_terms).sum()
    }
}

/// A claimed equality `lhs = rhs`.
pub struct Check {
    pub label: String,
    pub lhs: Frac,
    pub rhs: Frac,
}

impl Check {
    fn new(label: impl Into<String>, lhs: impl Into<Frac>, rhs: impl Into<Frac>) -> Self {
        Check { label: label.into(), lhs: lhs.into(), rhs: rhs.into() }
    }
}

impl From<Expr> for Frac {
    fn from(e: Expr) -> Frac {
        Frac::from_expr(e)
    }
}

fn int(k: i64) -> ParamPoly {
    ParamPoly::int(k)
}

fn m() -> ParamPoly {
    ParamPoly::param(Param::M)
}

fn anti(a: usize) -> IndexLetter {
    IndexLetter::Anti(a as u8 + 1)
}

/// `V_α = g(D_α + E_α) − i f_0 (D_α − 3E_α + 3G_α)`
fn flux(cat: &Catalog<'_>) -> Vec<Expr> {
    let de = cat.combine(&[(&cat.d, 1), (&cat.e, 1)]);
    let mix = cat.combine(&[(&cat.d, 1), (&cat.e, -3), (&cat.gv, 3)]);
    let if0 = cat.f0.scale(&ParamPoly::i());
    (0..cat.n()).map(|a| cat.g.mul(&de[a]).sub(&if0.mul(&mix[a]))).collect()
}

fn weighted_divergence(cat: &Catalog<'_>, w: &Expr) -> Result<Expr, JetError> {
    let v: Vec<Expr> = flux(cat).iter().map(|x| w.mul(x)).collect();
    cat.ctx.divergence_real(&v)
}

fn weighted_identity(cat: &Catalog<'_>, mutation: Option<Mutation>) -> Result<Vec<Check>, JetError> {
    let w = cat.weight();
    let lhs = weighted_divergence(cat, &w)?;
    let t = &cat.coeffs.factors;
    let mut c = cat.coeffs.c.clone();
    if let Some(Mutation::BumpCoefficient(k)) = mutation {
        c[k - 1] = c[k - 1].add(&Frac::one(), t);
    }
    let [p1, p4, p6] = psi_squares_parts(&c, &cat.coeffs, &cat.d, &cat.e, &cat.gv, |x| cat.ctx.conjugate(x));
    let de = cat.combine(&[(&cat.d, 1), (&cat.e, 1)]);
    let terms: [(WeightedTerm, Frac); 6] = [
        (WeightedTerm::Curvature, cat.ctx.e(2).mul(&cat.tensor_sq()).into()),
        (WeightedTerm::Tensor, cat.mixed_tensor_sq().into()),
        (WeightedTerm::Cross, cat.vec_sq(&de).neg().into()),
        (WeightedTerm::C1, p1),
        (WeightedTerm::C4, p4),
        (WeightedTerm::C6, p6),
    ];
    let mut rhs = Frac::zero();
    for (name, term) in terms {
        if mutation != Some(Mutation::DropTerm(name)) {
            rhs = rhs.add(&term, t);
        }
    }
    Ok(vec![Check::new("divergence", lhs, rhs.mul_expr(&w))])
}

fn unweighted_formula(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let w = cat.ctx.e(2 * cat.n() as i64 - 2);
    let lhs = weighted_divergence(cat, &w)?;
    let gd = cat.combine(&[(&cat.gv, 1), (&cat.d, 1)]);
    let ge = cat.combine(&[(&cat.gv, 1), (&cat.e, -1)]);
    let inner = cat
        .ctx
        .e(2)
        .mul(&cat.tensor_sq())
        .add(&cat.vec_sq(&cat.gv))
        .add(&cat.vec_sq(&gd))
        .add(&cat.vec_sq(&ge))
        .add(&cat.mixed_tensor_sq());
    Ok(vec![Check::new("divergence", lhs, w.mul(&inner))])
}

/// `(s(D̄_α + Ē_α) + i f_0 Ḡ_α)` for each `α`.
fn weight_gradient_core(cat: &Catalog<'_>) -> Vec<Expr> {
    let if0 = cat.f0.scale(&ParamPoly::i());
    (0..cat.n()).map(|a| cat.s.mul(&cat.db[a].add(&cat.eb[a])).add(&if0.mul(&cat.gvb[a]))).collect()
}

fn weight_derivative(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let em = ctx.e_pow(AffineExponent::param(Param::M));
    let hm = AffineExponent::zero().with_slope(Param::M, (-1, 2).into());
    let weight = em.mul(&ctx.h_pow(hm));
    let core = weight_gradient_core(cat);
    let mut out = Vec::new();
    for a in 0..cat.n() {
        let lhs = ctx.apply_derivation(&weight, anti(a))?;
        let dg = ctx.apply_derivation(&cat.g, anti(a))?;
        let dgb = ctx.apply_derivation(&cat.gbar, anti(a))?;
        let bracket = cat.gbar.mul(&dg).add(&cat.g.mul(&dgb));
        let inner = cat.fb[a].sub(&bracket.mul(&ctx.h_pow(AffineExponent::int(-1))).scale(&ParamPoly::frac(1, 2)));
        let first = weight.mul(&inner).scale(&m());
        let second = em.mul(&ctx.h_pow(hm - AffineExponent::int(1))).mul(&core[a]).scale(&m().neg());
        out.push(Check::new(format!("first form, alpha={}", a + 1), lhs, first.clone()));
        out.push(Check::new(format!("second form, alpha={}", a + 1), first, second));
    }
    Ok(out)
}

fn g_derivative(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let mut out = Vec::new();
    for a in 0..cat.n() {
        let dg = ctx.apply_derivation(&cat.g, anti(a))?;
        let dgb = ctx.apply_derivation(&cat.gbar, anti(a))?;
        let de = cat.db[a].add(&cat.eb[a]);
        out.push(Check::new(format!("g, alpha={}", a + 1), dg, de.add(&cat.gvb[a])));
        let rhs = de.sub(&cat.gvb[a]).add(&cat.gbar.mul(&cat.fb[a]).scale(&int(2)));
        out.push(Check::new(format!("gbar, alpha={}", a + 1), dgb, rhs));
    }
    Ok(out)
}

fn combination(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let w = cat.weight();
    let lhs = weighted_divergence(cat, &w)?;
    let gd = cat.combine(&[(&cat.gv, 1), (&cat.d, 1)]);
    let ge = cat.combine(&[(&cat.gv, 1), (&cat.e, -1)]);
    let de = cat.combine(&[(&cat.d, 1), (&cat.e, 1)]);
    let core = weight_gradient_core(cat);
    let v = flux(cat);
    // i f_0 (D − 3E + 3G) − g(D + E) = −V
    let pairing: Expr = (0..cat.n()).map(|a| v[a].neg().mul(&core[a])).sum();
    let psi = cat
        .vec_sq(&cat.gv)
        .add(&cat.vec_sq(&gd))
        .add(&cat.vec_sq(&ge))
        .add(&cat.vec_sq(&de))
        .add(&ctx.real_part(&pairing).mul(&ctx.h_pow(AffineExponent::int(-1))).scale(&m()));
    let inner = ctx.e(2).mul(&cat.tensor_sq()).add(&cat.mixed_tensor_sq()).sub(&cat.vec_sq(&de)).add(&psi);
    Ok(vec![
        Check::new("divergence", lhs, w.mul(&inner)),
        Check::new("psi by squares", psi, cat.psi_squares()),
    ])
}

fn time_flux(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let n = cat.n();
    let w = cat.weight();
    let phi = ctx.jet(Field::Phi, &[])?;
    let mut div = Expr::zero();
    for a in 0..n {
        let x = w.mul(&cat.f0).mul(&cat.fa[a]).mul(&phi);
        div.add_assign_ref(&ctx.apply_derivation(&x, anti(a))?);
    }
    let lhs = ctx.imag_part(&div);
    let g2 = cat.grad_sq.mul(&cat.grad_sq);
    let real = cat.f0.mul(&cat.f0).scale(&int(n as i64)).sub(&ctx.e(2).mul(&cat.grad_sq)).sub(&g2);
    let hinv = ctx.h_pow(AffineExponent::int(-1));
    let p = cat.coeffs.p_poly();
    let mut inner = Expr::zero();
    for a in 0..n {
        let bracket = p
            .mul(&cat.gvb[a])
            .scale(&ParamPoly::i())
            .sub(&cat.f0.mul(&cat.s).mul(&cat.db[a].add(&cat.eb[a])).scale(&m()));
        let phib = ctx.jet(Field::Phi, &[anti(a)])?;
        let term = hinv.mul(&bracket).mul(&phi).add(&cat.f0.mul(&phib));
        inner.add_assign_ref(&cat.fa[a].mul(&term));
    }
    let rhs = w.mul(&real).mul(&phi).add(&ctx.imag_part(&w.mul(&inner)));

    let mut out = vec![Check::new("divergence", lhs, rhs)];
    for a in 0..n {
        let f0b = ctx.f(&[anti(a), IndexLetter::T]);
        let rhs = cat.gvb[a].sub(&cat.gbar.mul(&cat.fb[a])).scale(&ParamPoly::i());
        out.push(Check::new(format!("f_0 derivative, alpha={}", a + 1), f0b, rhs));
    }
    Ok(out)
}

fn gradient_flux(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let n = cat.n() as i64;
    let w = cat.weight();
    let phi = ctx.jet(Field::Phi, &[])?;
    let gs = &cat.grad_sq;
    let g2 = gs.mul(gs);
    let v: Vec<Expr> = cat.fa.iter().map(|fa| w.mul(gs).mul(fa).mul(&phi)).collect();
    let lhs = ctx.divergence_real(&v)?;
    let e2 = ctx.e(2);
    let real = g2.scale(&int(n - 1)).sub(&e2.mul(gs).scale(&int(n + 1)));
    let hinv = ctx.h_pow(AffineExponent::int(-1));
    let damp = ctx.h_pow(AffineExponent::int(1)).sub(&e2.mul(gs).scale(&m())).sub(&g2.scale(&m()));
    let mut inner = Expr::zero();
    for a in 0..cat.n() {
        let bracket = damp
            .mul(&cat.db[a].add(&cat.eb[a]))
            .sub(&gs.mul(&cat.f0).mul(&cat.gvb[a]).scale(&m().mul(&ParamPoly::i())));
        let phib = ctx.jet(Field::Phi, &[anti(a)])?;
        let term = hinv.mul(&bracket).mul(&phi).add(&gs.mul(&phib));
        inner.add_assign_ref(&cat.fa[a].mul(&term));
    }
    let rhs = w.mul(&real).mul(&phi).add(&ctx.real_part(&w.mul(&inner)));

    let mut side1_lhs = Expr::zero();
    let mut side2_lhs = Expr::zero();
    for a in 0..cat.n() {
        for b in 0..cat.n() {
            let ab = ctx.f(&[anti(a), anti(b)]);
            side1_lhs.add_assign_ref(&ab.mul(&cat.fa[a]).mul(&cat.fa[b]));
            let ba = ctx.f(&[IndexLetter::Holo(b as u8 + 1), anti(a)]);
            side2_lhs.add_assign_ref(&ba.mul(&cat.fa[a]).mul(&cat.fb[b]));
        }
    }
    let fd: Expr = (0..cat.n()).map(|a| cat.fa[a].mul(&cat.db[a])).sum();
    let fe: Expr = (0..cat.n()).map(|a| cat.fa[a].mul(&cat.eb[a])).sum();
    Ok(vec![
        Check::new("divergence", lhs, rhs),
        Check::new("antiholomorphic hessian contraction", side1_lhs, fd.add(&g2.scale(&int(2)))),
        Check::new("mixed hessian contraction", side2_lhs, fe.sub(&cat.g.mul(gs))),
    ])
}

fn power_flux(cat: &Catalog<'_>) -> Result<Vec<Check>, JetError> {
    let ctx = cat.ctx;
    let n = cat.n() as i64;
    let eq = ctx.e_pow(AffineExponent::param(Param::Q));
    let theta = AffineExponent::param(Param::Theta);
    let eta = ctx.eta(theta);
    let v: Vec<Expr> = cat.fa.iter().map(|fa| eq.mul(fa).mul(&eta)).collect();
    let lhs = ctx.divergence_real(&v)?;
    let q_minus_n = ParamPoly::param(Param::Q).sub(&int(n));
    let first = eq.mul(&cat.grad_sq.scale(&q_minus_n).sub(&ctx.e(2).scale(&int(n)))).mul(&eta);
    let mut second = Expr::zero();
    for a in 0..cat.n() {
        second.add_assign_ref(&cat.fa[a].mul(&ctx.jet(Field::Eta, &[anti(a)])?));
    }
    let second = second.mul(&eq).mul(&ctx.eta(theta - AffineExponent::int(1))).scale(&ParamPoly::param(Param::Theta));
    Ok(vec![Check::new("divergence", lhs, ctx.real_part(&first.add(&second)))])
}

/// The sides of an identity, built in `ctx`.
pub fn identity_checks(
    cat: &Catalog<'_>,
    id: IdentityId,
    mutation: Option<Mutation>,
) -> Result<Vec<Check>, QuantityError> {
    if mutation.is_some() && id != IdentityId::Weighted {
        return Err(QuantityError::MutationUnsupported(id.name().to_string()));
    }
    let checks = match id {
        IdentityId::Weighted => weighted_identity(cat, mutation),
        IdentityId::Unweighted => unweighted_formula(cat),
        IdentityId::WeightDerivative => weight_derivative(cat),
        IdentityId::GDerivativePair => g_derivative(cat),
        IdentityId::TimeFlux => time_flux(cat),
        IdentityId::GradientFlux => gradient_flux(cat),
        IdentityId::PowerFlux => power_flux(cat),
        IdentityId::Combination => combination(cat),
        IdentityId::PsiSquares => return Err(QuantityError::NotAJetIdentity(id.name().to_string())),
    };
    checks.map_err(QuantityError::Jet)
}

fn substitute(e: &Expr, mode: &ParamMode) -> Expr {
    match mode {
        ParamMode::Formal => e.clone(),
        ParamMode::Rational(v) => e.substitute_param(Param::M, v),
    }
}

/// Decide one claimed equality and describe the outcome.
pub fn decide(cat: &Catalog<'_>, check: &Check, mode: &ParamMode) -> CheckOutcome {
    let diff = check.lhs.sub(&check.rhs, &cat.coeffs.factors);
    let residual = cat.ctx.normal_form(&substitute(&diff.num, mode));
    let status = match residual.sorted_terms().first() {
        None => ResidualStatus::Zero,
        Some((key, c)) => ResidualStatus::Nonzero { witness: display_term(key, c, cat.ctx.table()) },
    };
    CheckOutcome {
        label: check.label.clone(),
        status,
        lhs_terms: check.lhs.num.len(),
        rhs_terms: check.rhs.num.len(),
        residual_terms: residual.len(),
    }
}

pub fn verify_identity(id: IdentityId, n: usize, mode: &ParamMode) -> Result<VerificationReport, QuantityError> {
    verify_identity_with(id, n, &VerifyOptions { mode: mode.clone(), ..Default::default() })
}

pub fn verify_identity_with(id: IdentityId, n: usize, opts: &VerifyOptions) -> Result<VerificationReport, QuantityError> {
    if opts.mutation.is_some() && id != IdentityId::Weighted {
        return Err(QuantityError::MutationUnsupported(id.name().to_string()));
    }
    let ctx = CRContext::new(n).map_err(QuantityError::Jet)?;
    Ok(verify_in(&ctx, id, opts))
}

/// Run one identity in an existing context. Jet errors are reported as failed checks.
pub fn verify_in(ctx: &CRContext, id: IdentityId, opts: &VerifyOptions) -> VerificationReport {
    let start = Instant::now();
    let mode = &opts.mode;
    let checks = if id == IdentityId::PsiSquares {
        psi_squares_symbolic(ctx.n(), mode, opts.sign)
    } else {
        let cat = Catalog::with_sign(ctx, opts.sign);
        match identity_checks(&cat, id, opts.mutation) {
            Ok(checks) => checks.par_iter().map(|c| decide(&cat, c, mode)).collect(),
            Err(e) => vec![CheckOutcome {
                label: "build".into(),
                status: ResidualStatus::Failed(e.to_string()),
                lhs_terms: 0,
                rhs_terms: 0,
                residual_terms: 0,
            }],
        }
    };
    VerificationReport {
        identity: id,
        n: ctx.n(),
        mode: mode.clone(),
        mutation: opts.mutation,
        sign: opts.sign,
        checks,
        elapsed: start.elapsed(),
    }
}

/// Every identity for one `n`, run concurrently, in catalogue order.
pub fn verify_all(n: usize, opts: &VerifyOptions) -> Result<Vec<VerificationReport>, QuantityError> {
    let ctx = CRContext::new(n).map_err(QuantityError::Jet)?;
    Ok(IdentityId::ALL.par_iter().map(|&id| verify_in(&ctx, id, opts)).collect())
}
