//! Gaussian rationals: `a + b i` with `a, b` arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Shorthand for building a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Self::from_real(rat_int(v))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::from_real(rat(num, den))
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// `|a|² = re² + im²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: -&self.im, im: self.re.clone() }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self { re: &self.re / &d, im: -&self.im / &d })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Integer power, negative exponents through the inverse.
    pub fn powi(&self, k: i64) -> Result<Self, AlgebraError> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inv()?.pow((-k) as u32))
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::from_real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => fmt_imag(f, &self.im, false),
            (false, false) => {
                write!(f, "{}", self.re)?;
                fmt_imag(f, &self.im, true)
            }
        }
    }
}

fn fmt_imag(f: &mut fmt::Formatter<'_>, im: &BigRational, signed: bool) -> fmt::Result {
    let sign = if im.is_negative() {
        "-"
    } else if signed {
        "+"
    } else {
        ""
    };
    let mag = im.abs();
    if mag.is_one() {
        write!(f, "{sign}i")
    } else {
        write!(f, "{sign}{mag}i")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a GaussianRational> for &'a GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &'a GaussianRational) -> GaussianRational {
                let f: fn(&GaussianRational, &GaussianRational) -> GaussianRational = $body;
                f(self, rhs)
            }
        }
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussianRational { re: &a.re + &b.re, im: &a.im + &b.im });
forward_binop!(Sub, sub, |a, b| GaussianRational { re: &a.re - &b.re, im: &a.im - &b.im });
forward_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return GaussianRational::from_real(&a.re * &b.re);
    }
    GaussianRational {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re,
    }
});

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

/// The four field operations, dispatched by symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arith(
    a: &GaussianRational,
    b: &GaussianRational,
    op: ScalarOp,
) -> Result<GaussianRational, AlgebraError> {
    match op {
        ScalarOp::Add => Ok(a + b),
        ScalarOp::Sub => Ok(a - b),
        ScalarOp::Mul => Ok(a * b),
        ScalarOp::Div => a.checked_div(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    #[test]
    fn conjugate_sum_is_one() {
        let a = g((1, 2), (1, 1));
        let b = g((1, 2), (-1, 1));
        assert_eq!(scalar_arith(&a, &b, ScalarOp::Add).unwrap(), GaussianRational::one());
    }

    #[test]
    fn i_squared() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::int(-1));
    }

    #[test]
    fn rational_division() {
        let a = GaussianRational::frac(3, 4);
        let b = GaussianRational::int(-2);
        assert_eq!(scalar_arith(&a, &b, ScalarOp::Div).unwrap(), GaussianRational::frac(-3, 8));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = GaussianRational::one();
        assert_eq!(
            scalar_arith(&a, &GaussianRational::zero(), ScalarOp::Div),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(g((1, 2), (-1, 1)).to_string(), "1/2-i");
        assert_eq!(g((0, 1), (3, 2)).to_string(), "3/2i");
        assert_eq!(GaussianRational::zero().to_string(), "0");
    }
}
