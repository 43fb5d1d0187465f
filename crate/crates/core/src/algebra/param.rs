//! Polynomials in the formal real parameters `m`, `q`, `θ`.

use std::fmt;

use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use smallvec::SmallVec;

use super::exponent::AffineExponent;
use super::rational::GaussianRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    M,
    Q,
    Theta,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::M, Param::Q, Param::Theta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::M => "m",
            Param::Q => "q",
            Param::Theta => "θ",
        }
    }
}

/// Multi-degree in `(m, q, θ)`.
pub type ParamDegree = [u8; 3];

/// Sparse polynomial in the parameters with Gaussian-rational coefficients.
/// Entries are sorted by degree and never hold a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamPoly {
    terms: SmallVec<[(ParamDegree, GaussianRational); 1]>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.push(([0; 3], c));
        }
        p
    }

    pub fn int(v: i64) -> Self {
        Self::constant(GaussianRational::int(v))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::constant(GaussianRational::frac(num, den))
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    pub fn param(p: Param) -> Self {
        let mut deg = [0; 3];
        deg[p.index()] = 1;
        Self { terms: smallvec::smallvec![(deg, GaussianRational::one())] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &(ParamDegree, GaussianRational)> {
        self.terms.iter()
    }

    /// The value when every parameter is absent, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.as_slice() {
            [] => Some(GaussianRational::zero()),
            [([0, 0, 0], c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_real())
    }

    fn push_merge(&mut self, deg: ParamDegree, c: GaussianRational) {
        match self.terms.binary_search_by(|(d, _)| d.cmp(&deg)) {
            Ok(pos) => {
                self.terms[pos].1 += &c;
                if self.terms[pos].1.is_zero() {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => {
                if !c.is_zero() {
                    self.terms.insert(pos, (deg, c));
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ParamPoly) {
        for (d, c) in &other.terms {
            self.push_merge(*d, c.clone());
        }
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect() }
    }

    pub fn sub(&self, other: &ParamPoly) -> ParamPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ParamPoly) -> ParamPoly {
        if self.terms.len() == 1 && other.terms.len() == 1 {
            let (da, ca) = &self.terms[0];
            let (db, cb) = &other.terms[0];
            let c = ca * cb;
            let mut out = ParamPoly::zero();
            if !c.is_zero() {
                out.terms.push(([da[0] + db[0], da[1] + db[1], da[2] + db[2]], c));
            }
            return out;
        }
        let mut out = ParamPoly::zero();
        for (da, ca) in &self.terms {
            for (db, cb) in &other.terms {
                out.push_merge([da[0] + db[0], da[1] + db[1], da[2] + db[2]], ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly { terms: self.terms.iter().map(|(d, x)| (*d, x * c)).collect() }
    }

    pub fn conj(&self) -> ParamPoly {
        ParamPoly { terms: self.terms.iter().map(|(d, c)| (*d, c.conj())).collect() }
    }

    /// Replace a parameter by a rational value.
    pub fn substitute(&self, p: Param, value: &BigRational) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (d, c) in &self.terms {
            let k = d[p.index()];
            let mut nd = *d;
            nd[p.index()] = 0;
            let mut factor = BigRational::from_integer(1.into());
            for _ in 0..k {
                factor *= value;
            }
            out.push_merge(nd, c.scale(&factor));
        }
        out
    }

    pub fn eval(&self, params: &[f64; 3]) -> Complex64 {
        self.terms
            .iter()
            .map(|(d, c)| {
                let w: f64 = (0..3).map(|i| params[i].powi(d[i] as i32)).product();
                c.to_complex() * w
            })
            .sum()
    }

    /// Interpret a real polynomial of degree at most one as an affine exponent.
    pub fn to_affine(&self) -> Option<AffineExponent> {
        let mut e = AffineExponent::zero();
        for (d, c) in &self.terms {
            if !c.is_real() {
                return None;
            }
            let r = small_rational(&c.re)?;
            match d.iter().sum::<u8>() {
                0 => e.constant = r,
                1 => {
                    let idx = d.iter().position(|&k| k == 1)?;
                    e.slopes[idx] = r;
                }
                _ => return None,
            }
        }
        Some(e)
    }
}

pub(crate) fn small_rational(r: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

impl From<GaussianRational> for ParamPoly {
    fn from(c: GaussianRational) -> Self {
        ParamPoly::constant(c)
    }
}

impl From<&AffineExponent> for ParamPoly {
    fn from(e: &AffineExponent) -> Self {
        let mut out = ParamPoly::constant(GaussianRational::from_real(big(e.constant)));
        for p in Param::ALL {
            let s = e.slopes[p.index()];
            if !s.is_zero() {
                out.add_assign_ref(
                    &ParamPoly::param(p).scale(&GaussianRational::from_real(big(s))),
                );
            }
        }
        out
    }
}

pub(crate) fn big(r: Rational64) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(d, c)| {
                let mut s = String::new();
                let mono: Vec<String> = Param::ALL
                    .iter()
                    .filter(|p| d[p.index()] > 0)
                    .map(|p| match d[p.index()] {
                        1 => p.name().to_string(),
                        k => format!("{}^{}", p.name(), k),
                    })
                    .collect();
                if mono.is_empty() {
                    s.push_str(&c.to_string());
                } else if c.is_one() {
                    s.push_str(&mono.join("·"));
                } else {
                    s.push_str(&format!("({})·{}", c, mono.join("·")));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn one_minus_m_plus_m() {
        let m = ParamPoly::param(Param::M);
        let e = ParamPoly::one().sub(&m).add(&m);
        assert_eq!(e, ParamPoly::one());
    }

    #[test]
    fn substitution() {
        let m = ParamPoly::param(Param::M);
        let p = m.mul(&m).add(&ParamPoly::int(3));
        assert_eq!(p.substitute(Param::M, &rat(1, 2)), ParamPoly::frac(13, 4));
    }

    #[test]
    fn affine_roundtrip() {
        let p = ParamPoly::param(Param::M).scale(&GaussianRational::frac(-1, 2)).add(&ParamPoly::int(2));
        let e = p.to_affine().unwrap();
        assert_eq!(ParamPoly::from(&e), p);
        assert!(ParamPoly::param(Param::M).mul(&ParamPoly::param(Param::M)).to_affine().is_none());
    }
}
