//! Truncated Taylor arithmetic to fourth order.
//!
//! A [`Jet4`] stores the normalised Taylor coefficients `c[k] = f^(k)(x0) / k!`
//! of a quantity around an expansion point. Every elementary operation maps
//! input coefficients to output coefficients through the usual recurrences, so
//! evaluating an expression on the seed `x0 + ε` yields all derivatives up to
//! the fourth at once.

use crate::{Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Highest derivative order carried.
pub const MAX_ORDER: usize = 4;
const N: usize = MAX_ORDER + 1;

const FACTORIAL: [f64; N] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4 {
    c: [f64; N],
}

impl Jet4 {
    pub fn from_coeffs(c: [f64; N]) -> Self {
        Jet4 { c }
    }

    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = value;
        Jet4 { c }
    }

    /// The independent variable expanded at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x0;
        c[1] = 1.0;
        Jet4 { c }
    }

    pub fn coeffs(&self) -> [f64; N] {
        self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k!·c[k]`, the k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= MAX_ORDER, "derivative order {k} exceeds {MAX_ORDER}");
        FACTORIAL[k] * self.c[k]
    }

    pub fn derivatives(&self) -> [f64; N] {
        std::array::from_fn(|k| self.derivative(k))
    }

    /// Zero every coefficient above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        for ck in self.c.iter_mut().skip(order + 1) {
            *ck = 0.0;
        }
        self
    }

    pub fn scale(self, s: f64) -> Self {
        Jet4 {
            c: self.c.map(|v| v * s),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn checked_div(self, rhs: Jet4) -> Result<Jet4> {
        let b0 = rhs.c[0];
        if b0 == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(Jet4 { c: q })
    }

    pub fn exp(self) -> Jet4 {
        let mut e = [0.0; N];
        e[0] = self.c[0].exp();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet4 { c: e }
    }

    pub fn ln(self) -> Result<Jet4> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!("log of non-positive value {a0}")));
        }
        let mut l = [0.0; N];
        l[0] = a0.ln();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Ok(Jet4 { c: l })
    }

    /// Sine and cosine together; their coefficient recurrences are coupled.
    pub fn sin_cos(self) -> (Jet4, Jet4) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        (s[0], c[0]) = self.c[0].sin_cos();
        for k in 1..N {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                sa += w * c[k - j];
                ca += w * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = -ca / k as f64;
        }
        (Jet4 { c: s }, Jet4 { c })
    }

    pub fn sin(self) -> Jet4 {
        self.sin_cos().0
    }

    pub fn cos(self) -> Jet4 {
        self.sin_cos().1
    }

    /// Non-negative integer power by repeated squaring. Valid at a zero base.
    pub fn powi(self, n: u32) -> Jet4 {
        let mut result = Jet4::constant(1.0);
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            n >>= 1;
        }
        result
    }

    /// Real power of a jet with a strictly positive value.
    pub fn powf(self, r: f64) -> Result<Jet4> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return Err(Error::Domain(format!(
                "real power {r} of non-positive value {a0}"
            )));
        }
        let mut u = [0.0; N];
        u[0] = a0.powf(r);
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((r + 1.0) * j as f64 - k as f64) * self.c[j] * u[k - j];
            }
            u[k] = acc / (k as f64 * a0);
        }
        Ok(Jet4 { c: u })
    }

    /// `|a|` for a jet whose value is nonzero.
    pub fn abs_nonzero(self) -> Jet4 {
        if self.c[0] < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            c: std::array::from_fn(|k| self.c[k] + rhs.c[k]),
        }
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(self, rhs: Jet4) -> Jet4 {
        Jet4 {
            c: std::array::from_fn(|k| self.c[k] - rhs.c[k]),
        }
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        Jet4 {
            c: self.c.map(|v| -v),
        }
    }
}

/// Truncated Cauchy product.
impl Mul for Jet4 {
    type Output = Jet4;
    fn mul(self, rhs: Jet4) -> Jet4 {
        let mut p = [0.0; N];
        for (k, pk) in p.iter_mut().enumerate() {
            for j in 0..=k {
                *pk += self.c[j] * rhs.c[k - j];
            }
        }
        Jet4 { c: p }
    }
}
