//! Truncated Taylor jets of total order <= 3 in the four coordinates (x1, x2, y1, y2).
//!
//! Coefficients are Taylor-normalized: a jet stores `c_α = ∂^α f / α!`, so the
//! value of `f(P + Δ)` is `Σ c_α Δ^α`. [`Jet3::partial`] multiplies by `α!`
//! to recover the plain derivative.
//!
//! Differentiating a jet ([`Jet3::d`]) lowers the order up to which its
//! coefficients are exact by one; truncated products of jets exact to order `r`
//! stay exact to order `r`, so a second derivative of an order-3 jet still
//! carries exact first derivatives.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::Scalar;

pub const NVARS: usize = 4;
pub const ORDER: usize = 3;
pub const NCOEF: usize = 35;

/// Multi-index over (x1, x2, y1, y2).
pub type MultiIndex = [u8; NVARS];

const NONE: u8 = u8::MAX;

struct Tables {
    alphas: [MultiIndex; NCOEF],
    index: [[[[u8; 4]; 4]; 4]; 4],
    factorial: [f64; NCOEF],
    // (i, j, k): alpha_i + alpha_j = alpha_k
    products: Vec<(u8, u8, u8)>,
    // derivative along v: target k takes (alpha_k[v] + 1) * c[source]
    shift: [[u8; NCOEF]; NVARS],
}

fn degree(a: &MultiIndex) -> usize {
    a.iter().map(|&e| e as usize).sum()
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut list = Vec::with_capacity(NCOEF);
        for d in 0..=ORDER {
            // lexicographic within each degree, x1 first
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    for c in (0..=d - a - b).rev() {
                        let e = d - a - b - c;
                        list.push([a as u8, b as u8, c as u8, e as u8]);
                    }
                }
            }
        }
        assert_eq!(list.len(), NCOEF);
        let mut alphas = [[0u8; 4]; NCOEF];
        alphas.copy_from_slice(&list);
        let mut index = [[[[NONE; 4]; 4]; 4]; 4];
        for (k, a) in alphas.iter().enumerate() {
            index[a[0] as usize][a[1] as usize][a[2] as usize][a[3] as usize] = k as u8;
        }
        let fact = |n: u8| (1..=n as u64).product::<u64>() as f64;
        let mut factorial = [1.0; NCOEF];
        for (k, a) in alphas.iter().enumerate() {
            factorial[k] = a.iter().map(|&e| fact(e)).product();
        }
        let mut products = Vec::new();
        for (i, a) in alphas.iter().enumerate() {
            for (j, b) in alphas.iter().enumerate() {
                if degree(a) + degree(b) <= ORDER {
                    let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                    let k = index[s[0] as usize][s[1] as usize][s[2] as usize][s[3] as usize];
                    products.push((i as u8, j as u8, k));
                }
            }
        }
        let mut shift = [[NONE; NCOEF]; NVARS];
        for (v, row) in shift.iter_mut().enumerate() {
            for (k, a) in alphas.iter().enumerate() {
                if degree(a) < ORDER {
                    let mut s = *a;
                    s[v] += 1;
                    row[k] = index[s[0] as usize][s[1] as usize][s[2] as usize][s[3] as usize];
                }
            }
        }
        Tables { alphas, index, factorial, products, shift }
    })
}

/// Position of a multi-index in the coefficient array, if its degree is at most 3.
pub fn index_of(alpha: MultiIndex) -> Option<usize> {
    if alpha.iter().any(|&e| e > 3) {
        return None;
    }
    let k = tables().index[alpha[0] as usize][alpha[1] as usize][alpha[2] as usize][alpha[3] as usize];
    (k != NONE).then_some(k as usize)
}

/// All multi-indices in storage order (by degree, then lexicographic).
pub fn multi_indices() -> &'static [MultiIndex; NCOEF] {
    &tables().alphas
}

/// Unit multi-index along one coordinate.
pub fn unit(v: usize) -> MultiIndex {
    let mut a = [0u8; NVARS];
    a[v] = 1;
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3<T> {
    c: [T; NCOEF],
}

impl<T: Scalar> Jet3<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::zero(); NCOEF];
        c[0] = v;
        Jet3 { c }
    }

    /// The coordinate `var` expanded at `at`.
    pub fn variable(var: usize, at: T) -> Self {
        let mut j = Self::constant(at);
        j.c[1 + var] = T::one();
        j
    }

    pub fn from_coefficients(c: [T; NCOEF]) -> Self {
        Jet3 { c }
    }

    pub fn coefficients(&self) -> &[T; NCOEF] {
        &self.c
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    /// Taylor coefficient `∂^α f / α!`.
    pub fn coeff(&self, alpha: MultiIndex) -> T {
        index_of(alpha).map_or(T::zero(), |k| self.c[k])
    }

    /// Plain partial derivative `∂^α f` at the expansion point.
    pub fn partial(&self, alpha: MultiIndex) -> T {
        match index_of(alpha) {
            Some(k) => self.c[k] * T::lit(tables().factorial[k]),
            None => T::zero(),
        }
    }

    /// First partial along coordinate `var`.
    pub fn d1(&self, var: usize) -> T {
        self.c[1 + var]
    }

    /// Jet of the partial derivative along `var`; exact to one order less.
    pub fn d(&self, var: usize) -> Self {
        let t = tables();
        let mut c = [T::zero(); NCOEF];
        for (k, out) in c.iter_mut().enumerate() {
            let src = t.shift[var][k];
            if src != NONE {
                let m = t.alphas[k][var] as f64 + 1.0;
                *out = self.c[src as usize] * T::lit(m);
            }
        }
        Jet3 { c }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v = *v * s;
        }
        Jet3 { c }
    }

    /// `g(self)` where `g(c0 + δ) = g0 + g1 δ + g2 δ² + g3 δ³` (Taylor-normalized coefficients of `g`).
    fn compose(&self, g: [T; 4]) -> Self {
        let mut delta = *self;
        delta.c[0] = T::zero();
        let inner = delta.scale(g[3]) + Jet3::constant(g[2]);
        let inner = delta * inner + Jet3::constant(g[1]);
        delta * inner + Jet3::constant(g[0])
    }

    /// `1 / self`; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        let r = self.c[0].recip();
        let r2 = r * r;
        self.compose([r, -r2, r2 * r, -r2 * r2])
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        self.compose([e, e, e / two, e / six])
    }

    /// Natural logarithm; the constant term must be positive.
    pub fn ln(&self) -> Self {
        let c0 = self.c[0];
        let r = c0.recip();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        self.compose([c0.ln(), r, -r * r / two, r * r * r / three])
    }

    /// Integer power; negative exponents require a nonzero constant term.
    pub fn powi(&self, k: i32) -> Self {
        if k < 0 {
            return self.recip().powi(-k);
        }
        let mut base = *self;
        let mut acc = Jet3::constant(T::one());
        let mut n = k as u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }
}

impl<T: Scalar> Add for Jet3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a = *a + *b;
        }
        Jet3 { c }
    }
}

impl<T: Scalar> Sub for Jet3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a = *a - *b;
        }
        Jet3 { c }
    }
}

impl<T: Scalar> Neg for Jet3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a = -*a;
        }
        Jet3 { c }
    }
}

impl<T: Scalar> Mul for Jet3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [T::zero(); NCOEF];
        for &(i, j, k) in &tables().products {
            c[k as usize] = c[k as usize] + self.c[i as usize] * o.c[j as usize];
        }
        Jet3 { c }
    }
}
