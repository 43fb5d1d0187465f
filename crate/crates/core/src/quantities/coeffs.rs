//! The rational coefficients `c1..c6`, with the square root `√(|g|² − f_0²)` written as `s`.

use crate::algebra::{AffineExponent, Expr, FactorId, FactorTable, Frac, Param, ParamPoly, SymId};

/// Sign of the imaginary part of `c5`. `Minus` is the one that completes the square; `Plus`
/// is kept so the opposite choice can be exercised and shown to leave a residual.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TwistSign {
    #[default]
    Minus,
    Plus,
}

impl TwistSign {
    pub fn value(self) -> i64 {
        match self {
            TwistSign::Minus => -1,
            TwistSign::Plus => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TwistSign::Minus => "minus",
            TwistSign::Plus => "plus",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "minus" => Some(TwistSign::Minus),
            "plus" => Some(TwistSign::Plus),
            _ => None,
        }
    }
}

pub struct Coefficients {
    pub factors: FactorTable,
    /// `h − m f_0²`
    pub p: FactorId,
    /// `(5 − 3m) h − m(1 + m) f_0²`
    pub q: FactorId,
    pub c: [Frac; 6],
}

fn m() -> ParamPoly {
    ParamPoly::param(Param::M)
}

fn lin(a: i64, b: i64) -> ParamPoly {
    ParamPoly::int(a).add(&m().scale(&b.into()))
}

impl Coefficients {
    /// `f0` and `s` are the expressions standing for `f_0` and `|∂f|² + e^{2f}`; `h` is the
    /// weight base abbreviating `s² + f_0²`.
    pub fn new(f0: &Expr, s: &Expr, h: SymId) -> Self {
        Self::with_sign(f0, s, h, TwistSign::default())
    }

    pub fn with_sign(f0: &Expr, s: &Expr, h: SymId, sign: TwistSign) -> Self {
        let h1 = Expr::weight(h, AffineExponent::int(1));
        let hm1 = Expr::weight(h, AffineExponent::int(-1));
        let f02 = f0.mul(f0);
        let mp = m();
        let p_poly = h1.sub(&f02.scale(&mp));
        let q_poly = h1.scale(&lin(5, -3)).sub(&f02.scale(&mp.mul(&lin(1, 1))));
        let mut factors = FactorTable::new();
        let p = factors.register("h - m f0^2", p_poly.clone());
        let q = factors.register("(5-3m)h - m(1+m)f0^2", q_poly);

        let third = ParamPoly::frac(1, 3);
        // 2 m i f_0 s
        let twist = f0.mul(s).scale(&mp.scale(&2.into()).mul(&ParamPoly::i()));

        let c1 = Frac::from_expr(hm1.mul(&p_poly).scale(&ParamPoly::int(3)));
        let c2 = Frac::over(p_poly.sub(&twist).scale(&third), p);
        let c3 = Frac::over(p_poly.add(&twist).scale(&third.neg()), p);
        let c4_num = p_poly.scale(&lin(5, -3)).add(&f02.scale(&mp.mul(&lin(1, -1)).scale(&4.into())));
        let c4 = Frac::over(c4_num.scale(&third), p);
        let c5_num = h1
            .scale(&lin(4, -3))
            .sub(&f02.scale(&mp.mul(&lin(2, 1))))
            .add(&hm1.mul(&f02).mul(&f02).scale(&mp.mul(&mp).scale(&2.into())))
            .add(&twist.mul(&p_poly).mul(&hm1).scale(&ParamPoly::int(sign.value())));
        let c5 = Frac::over(c5_num, q);
        let c6_num = h1.scale(&lin(3, -2)).add(&f02.scale(&mp.mul(&lin(5, -6))));
        let c6 = Frac::over(c6_num, q);
        Coefficients { factors, p, q, c: [c1, c2, c3, c4, c5, c6] }
    }

    /// `c_k` for `k` in `1..=6`.
    pub fn get(&self, k: usize) -> &Frac {
        &self.c[k - 1]
    }

    pub fn p_poly(&self) -> &Expr {
        self.factors.poly(self.p)
    }

    pub fn q_poly(&self) -> &Expr {
        self.factors.poly(self.q)
    }
}

/// Floating-point coefficients at `(m, f_0, s)` using the genuine square root.
pub fn coefficients_f64(m: f64, f0: f64, s: f64, sign: TwistSign) -> [num_complex::Complex64; 6] {
    use num_complex::Complex64 as C;
    let h = s * s + f0 * f0;
    let root = (h - f0 * f0).max(0.0).sqrt();
    let p = h - m * f0 * f0;
    let q = (5.0 - 3.0 * m) * h - m * (1.0 + m) * f0 * f0;
    let tw = C::new(0.0, 2.0 * m * f0 * root);
    [
        C::from(3.0 * p / h),
        (C::from(1.0) - tw / p) / 3.0,
        -(C::from(1.0) + tw / p) / 3.0,
        C::from((5.0 - 3.0 * m + 4.0 * m * (1.0 - m) * f0 * f0 / p) / 3.0),
        C::from(((4.0 - 3.0 * m) * h - m * (2.0 + m) * f0 * f0 + 2.0 * m * m * f0.powi(4) / h) / q)
            + tw * p / (h * q) * sign.value() as f64,
        C::from(((3.0 - 2.0 * m) * h + m * (5.0 - 6.0 * m) * f0 * f0) / q),
    ]
}
