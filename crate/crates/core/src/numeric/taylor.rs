//! Truncated multivariate Taylor polynomials of total degree ≤ 3 with complex
//! coefficients.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustc_hash::FxHashMap;

/// Monomials `x_i x_j x_k` (`i ≤ j ≤ k`) of degree ≤ 3 in `d` variables, with product
/// and derivative tables.
#[derive(Debug)]
pub struct Basis {
    pub d: usize,
    /// Sorted variable indices of each monomial; index 0 is the constant.
    pub monos: Vec<Vec<u8>>,
    index: FxHashMap<Vec<u8>, usize>,
    /// `(a, b, a·b)` for every pair with `deg a + deg b ≤ 3`.
    products: Vec<(u32, u32, u32)>,
    /// `∂_i` maps monomial `m·x_i` to `m` with factor `power_i(m) + 1`: entries `(source, target, factor)`.
    derivatives: Vec<Vec<(u32, u32, f64)>>,
}

impl Basis {
    fn build(d: usize) -> Basis {
        let mut monos = vec![vec![]];
        for i in 0..d as u8 {
            monos.push(vec![i]);
        }
        for i in 0..d as u8 {
            for j in i..d as u8 {
                monos.push(vec![i, j]);
            }
        }
        for i in 0..d as u8 {
            for j in i..d as u8 {
                for k in j..d as u8 {
                    monos.push(vec![i, j, k]);
                }
            }
        }
        let index: FxHashMap<Vec<u8>, usize> = monos.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        let mut products = Vec::new();
        for (a, ma) in monos.iter().enumerate() {
            for (b, mb) in monos.iter().enumerate() {
                if ma.len() + mb.len() <= 3 {
                    let mut m = [ma.as_slice(), mb.as_slice()].concat();
                    m.sort_unstable();
                    products.push((a as u32, b as u32, index[&m] as u32));
                }
            }
        }
        let mut derivatives = vec![Vec::new(); d];
        for (t, m) in monos.iter().enumerate() {
            if m.len() == 3 {
                continue;
            }
            for (i, list) in derivatives.iter_mut().enumerate() {
                let mut src = m.clone();
                src.push(i as u8);
                src.sort_unstable();
                let power = m.iter().filter(|&&v| v as usize == i).count() + 1;
                list.push((index[&src] as u32, t as u32, power as f64));
            }
        }
        Basis { d, monos, index, products, derivatives }
    }

    /// Shared basis for `d` variables.
    pub fn get(d: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<FxHashMap<usize, Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        cache.lock().unwrap().entry(d).or_insert_with(|| Arc::new(Basis::build(d))).clone()
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, vars: &[usize]) -> Option<usize> {
        let mut m: Vec<u8> = vars.iter().map(|&v| v as u8).collect();
        m.sort_unstable();
        self.index.get(&m).copied()
    }
}

/// `Σ c_m ξ^m` around a base point; `c_m = ∂^m F / m!`. Each multi-index is stored once.
#[derive(Clone, Debug)]
pub struct TaylorValue3 {
    pub basis: Arc<Basis>,
    pub coeffs: Vec<Complex64>,
}

impl TaylorValue3 {
    pub fn constant(basis: &Arc<Basis>, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        coeffs[0] = c;
        TaylorValue3 { basis: basis.clone(), coeffs }
    }

    /// The coordinate `x_i` around the value `at`.
    pub fn variable(basis: &Arc<Basis>, i: usize, at: f64) -> Self {
        let mut out = Self::constant(basis, Complex64::new(at, 0.0));
        out.coeffs[1 + i] = Complex64::new(1.0, 0.0);
        out
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `∂^{vars} F` at the base point; order of `vars` is irrelevant.
    pub fn partial(&self, vars: &[usize]) -> Complex64 {
        let Some(k) = self.basis.index_of(vars) else {
            return Complex64::new(0.0, 0.0);
        };
        let mut fact = 1.0;
        let m = &self.basis.monos[k];
        let mut run = 1.0;
        for w in 0..m.len() {
            if w > 0 && m[w] == m[w - 1] {
                run += 1.0;
            } else {
                run = 1.0;
            }
            fact *= run;
        }
        self.coeffs[k] * fact
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        TaylorValue3 { basis: self.basis.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TaylorValue3 { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    pub fn conj(&self) -> Self {
        TaylorValue3 { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|a| a.conj()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.basis.len()];
        for &(a, b, c) in &self.basis.products {
            let x = self.coeffs[a as usize];
            let y = other.coeffs[b as usize];
            if x.re != 0.0 || x.im != 0.0 {
                coeffs[c as usize] += x * y;
            }
        }
        TaylorValue3 { basis: self.basis.clone(), coeffs }
    }

    /// `g(F)` from `[g(a), g'(a), g''(a)/2, g'''(a)/6]` at `a = F(0)`.
    pub fn compose(&self, g: [Complex64; 4]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = Complex64::new(0.0, 0.0);
        let d2 = delta.mul(&delta);
        let d3 = d2.mul(&delta);
        let mut out = Self::constant(&self.basis, g[0]);
        out = out.add(&delta.scale(g[1]));
        out = out.add(&d2.scale(g[2]));
        out.add(&d3.scale(g[3]))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0])
    }

    pub fn ln(&self) -> Self {
        let a = self.value();
        self.compose([a.ln(), 1.0 / a, -1.0 / (2.0 * a * a), 1.0 / (3.0 * a * a * a)])
    }

    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let s = a.sqrt();
        self.compose([s, 0.5 / s, -0.125 / (s * a), 0.0625 / (s * a * a)])
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let r = 1.0 / a;
        self.compose([r, -r * r, r * r * r, -r * r * r * r])
    }

    pub fn powi(&self, k: i64) -> Self {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut out = Self::constant(&self.basis, Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// `∂_i F`, exact through degree 2.
    pub fn derivative(&self, i: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.basis.len()];
        for &(src, dst, k) in &self.basis.derivatives[i] {
            coeffs[dst as usize] = self.coeffs[src as usize] * k;
        }
        TaylorValue3 { basis: self.basis.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn basis_size() {
        assert_eq!(Basis::get(3).len(), 20);
        assert_eq!(Basis::get(7).len(), 120);
    }

    #[test]
    fn product_and_partials() {
        let b = Basis::get(3);
        let x = TaylorValue3::variable(&b, 0, 2.0);
        let y = TaylorValue3::variable(&b, 1, -1.0);
        let f = x.mul(&x).mul(&y);
        assert_eq!(f.partial(&[0, 0, 1]), c(2.0));
        assert_eq!(f.partial(&[0, 1, 0]), c(2.0));
        assert_eq!(f.partial(&[0]), c(-4.0));
        assert_eq!(f.value(), c(-4.0));
    }

    #[test]
    fn elementary_functions() {
        let b = Basis::get(1);
        let x = TaylorValue3::variable(&b, 0, 0.7);
        let e = x.exp();
        for k in 0..=3 {
            let vars = vec![0; k];
            assert!((e.partial(&vars) - c(0.7f64.exp())).norm() < 1e-14);
        }
        let l = x.ln();
        assert!((l.partial(&[0, 0, 0]) - c(2.0 / 0.343)).norm() < 1e-12);
        let s = x.sqrt().mul(&x.sqrt()).sub(&x);
        assert!(s.coeffs.iter().all(|v| v.norm() < 1e-14));
        let r = x.recip().mul(&x);
        assert!((r.value() - c(1.0)).norm() < 1e-15 && r.coeffs[1..].iter().all(|v| v.norm() < 1e-14));
        assert!((x.powi(-2).partial(&[0]) - c(-2.0 / 0.343)).norm() < 1e-12);
    }
}
