use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::param::Param;

/// `constant + Σ slope_p · p` over the parameters `(m, q, θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineExponent {
    pub constant: Rational64,
    pub slopes: [Rational64; 3],
}

impl AffineExponent {
    pub fn zero() -> Self {
        Self { constant: Rational64::zero(), slopes: [Rational64::zero(); 3] }
    }

    pub fn int(v: i64) -> Self {
        Self::constant(Rational64::from_integer(v))
    }

    pub fn constant(c: Rational64) -> Self {
        Self { constant: c, ..Self::zero() }
    }

    pub fn param(p: Param) -> Self {
        let mut e = Self::zero();
        e.slopes[p.index()] = Rational64::one();
        e
    }

    pub fn with_slope(mut self, p: Param, slope: Rational64) -> Self {
        self.slopes[p.index()] = slope;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.slopes.iter().all(|s| s.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.slopes.iter().all(|s| s.is_zero())
    }

    /// Integer value, when the exponent is a parameter-free integer.
    pub fn as_integer(&self) -> Option<i64> {
        (self.is_constant() && self.constant.is_integer()).then(|| self.constant.to_integer())
    }

    /// Split into `(integer part, remainder)` where the remainder has a constant in `[0, 1)`.
    pub fn split_integer(&self) -> (i64, AffineExponent) {
        let k = self.constant.floor().to_integer();
        let mut rest = *self;
        rest.constant -= Rational64::from_integer(k);
        (k, rest)
    }

    pub fn substitute(&self, p: Param, value: Rational64) -> AffineExponent {
        let mut out = *self;
        out.constant += out.slopes[p.index()] * value;
        out.slopes[p.index()] = Rational64::zero();
        out
    }

    pub fn eval(&self, params: &[f64; 3]) -> f64 {
        let r = |x: Rational64| *x.numer() as f64 / *x.denom() as f64;
        r(self.constant) + (0..3).map(|i| r(self.slopes[i]) * params[i]).sum::<f64>()
    }
}

pub fn exponent_add(a: &AffineExponent, b: &AffineExponent) -> AffineExponent {
    *a + *b
}

impl Add for AffineExponent {
    type Output = AffineExponent;
    fn add(self, rhs: AffineExponent) -> AffineExponent {
        AffineExponent {
            constant: self.constant + rhs.constant,
            slopes: [
                self.slopes[0] + rhs.slopes[0],
                self.slopes[1] + rhs.slopes[1],
                self.slopes[2] + rhs.slopes[2],
            ],
        }
    }
}

impl Neg for AffineExponent {
    type Output = AffineExponent;
    fn neg(self) -> AffineExponent {
        AffineExponent {
            constant: -self.constant,
            slopes: [-self.slopes[0], -self.slopes[1], -self.slopes[2]],
        }
    }
}

impl Sub for AffineExponent {
    type Output = AffineExponent;
    fn sub(self, rhs: AffineExponent) -> AffineExponent {
        self + (-rhs)
    }
}

impl fmt::Display for AffineExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for p in Param::ALL {
            let s = self.slopes[p.index()];
            if s.is_zero() {
                continue;
            }
            if s == Rational64::one() {
                parts.push(p.name().to_string());
            } else if s == -Rational64::one() {
                parts.push(format!("-{}", p.name()));
            } else {
                parts.push(format!("{}{}", s, p.name()));
            }
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join("+").replace("+-", "-"))
    }
}
