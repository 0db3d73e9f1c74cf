//! Truncated Taylor series ("jets") with complex coefficients.
//!
//! A jet stores `c[k] = f^(k)(x0) / k!` for `k < JET_LEN`. Arithmetic on jets
//! propagates derivatives exactly (up to rounding), which is how profile
//! derivatives up to order `n` are produced without finite differences.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const JET_LEN: usize = 8;

/// Highest derivative order a jet carries.
pub const MAX_ORDER: usize = JET_LEN - 1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [Complex64; JET_LEN],
}

impl Jet {
    pub fn zero() -> Self {
        Jet { c: [ZERO; JET_LEN] }
    }

    pub fn constant(v: Complex64) -> Self {
        let mut j = Self::zero();
        j.c[0] = v;
        j
    }

    pub fn real(v: f64) -> Self {
        Self::constant(Complex64::new(v, 0.0))
    }

    /// The independent variable `x` expanded at `x0` with slope `dx`.
    pub fn variable(x0: f64, dx: f64) -> Self {
        let mut j = Self::real(x0);
        j.c[1] = Complex64::new(dx, 0.0);
        j
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> Complex64 {
        assert!(k <= MAX_ORDER, "jet order {k} exceeds {MAX_ORDER}");
        self.c[k] * factorial(k)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| *v == ZERO)
    }

    pub fn exp(&self) -> Self {
        if self.c[0].re < -700.0 {
            return Self::zero();
        }
        let mut g = [ZERO; JET_LEN];
        g[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.c[j] * g[k - j] * (j as f64);
            }
            g[k] = acc / (k as f64);
        }
        Jet { c: g }
    }

    /// Principal-branch logarithm. The expansion point must be nonzero.
    pub fn ln(&self) -> Self {
        let f0 = self.c[0];
        let mut h = [ZERO; JET_LEN];
        h[0] = f0.ln();
        for k in 1..JET_LEN {
            let mut acc = ZERO;
            for j in 1..k {
                acc += h[j] * self.c[k - j] * (j as f64);
            }
            h[k] = (self.c[k] - acc / (k as f64)) / f0;
        }
        Jet { c: h }
    }

    pub fn powc(&self, p: Complex64) -> Self {
        self.ln().scale(p).exp()
    }

    pub fn powf(&self, p: f64) -> Self {
        self.powc(Complex64::new(p, 0.0))
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut out = Self::real(1.0);
        let mut base = *self;
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            e >>= 1;
        }
        out
    }

    pub fn recip(&self) -> Self {
        Self::real(1.0) / *self
    }

    /// f(self) given the Taylor coefficients `taylor[k] = f^(k)(x0)/k!` of f
    /// at the expansion point x0 = Re c[0].
    pub fn compose(&self, taylor: &[Complex64; JET_LEN]) -> Self {
        let mut delta = *self;
        delta.c[0] = ZERO;
        let mut acc = Self::constant(taylor[JET_LEN - 1]);
        for k in (0..JET_LEN - 1).rev() {
            acc = acc * delta + Self::constant(taylor[k]);
        }
        acc
    }

    /// `e^{i s x}` for the jet `x`.
    pub fn cis(&self, s: f64) -> Self {
        self.scale(Complex64::new(0.0, s)).exp()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_re(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [ZERO; JET_LEN];
        for i in 0..JET_LEN {
            if self.c[i] == ZERO {
                continue;
            }
            for j in 0..JET_LEN - i {
                out[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Jet { c: out }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let b0 = rhs.c[0];
        let mut q = [ZERO; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Jet { c: q }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale_re(rhs)
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        self.scale(rhs)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}
