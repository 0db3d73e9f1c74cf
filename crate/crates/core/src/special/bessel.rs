//! Bessel functions of the first kind for real order ν ≥ -1/2.
//!
//! Branches: power series for small arguments, closed forms for half-integer
//! orders, Miller's backward recurrence (normalised by the Neumann sum
//! `(z/2)^ν = Σ_k (ν+2k) Γ(ν+k)/k! J_{ν+2k}(z)`) for the intermediate band, and
//! the Hankel asymptotic expansion beyond `HANKEL_THRESHOLD`.

use crate::error::{Error, Result};
use crate::jet::{Jet, JET_LEN};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub const HANKEL_THRESHOLD: f64 = 200.0;

/// Order ν of a Bessel function, ν ≥ -1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= -0.5) {
            return Err(Error::InvalidOrder(nu));
        }
        Ok(BesselOrder { nu })
    }

    /// ν = (n-2)/2 for dimension n ≥ 2.
    pub fn from_dimension(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(BesselOrder {
            nu: (n as f64 - 2.0) / 2.0,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    fn is_half_integer(&self) -> bool {
        let twice = 2.0 * self.nu;
        twice.fract() == 0.0 && (twice as i64) % 2 != 0
    }
}

/// J_ν(z) for z ≥ 0.
pub fn bessel_j(order: BesselOrder, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::OutOfRange(format!("bessel_j needs z >= 0, got {z}")));
    }
    Ok(bessel_j_unchecked(order.nu, z))
}

/// Same as [`bessel_j`] without validation; callers guarantee ν ≥ -1/2, z ≥ 0.
pub fn bessel_j_unchecked(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let order = BesselOrder { nu };
    if z * z <= 4.0 * (nu + 1.0) || z <= 2.0 {
        return series(nu, z);
    }
    if order.is_half_integer() && z >= nu + 1.0 {
        return half_integer(nu, z);
    }
    if z <= HANKEL_THRESHOLD {
        miller(nu, z)
    } else {
        hankel(nu, z)
    }
}

fn series(nu: f64, z: f64) -> f64 {
    let h = 0.5 * z;
    let mut term = h.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for m in 1..500 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn half_integer(nu: f64, z: f64) -> f64 {
    let pref = (2.0 / (PI * z)).sqrt();
    let mut prev = pref * z.cos(); // ν = -1/2
    let mut cur = pref * z.sin(); // ν = 1/2
    if nu == -0.5 {
        return prev;
    }
    let mut order = 0.5;
    while order < nu {
        let next = 2.0 * order / z * cur - prev;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    cur
}

fn miller(nu: f64, z: f64) -> f64 {
    let mut top = (z + 60.0 + 12.0 * z.sqrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    // g_j = Γ(ν+j)/j!, stepped down from j = top/2
    let mut j = top / 2;
    let jf = j as f64;
    let mut g = (libm::lgamma(nu + jf) - libm::lgamma(jf + 1.0)).exp();
    let mut f_next = 0.0; // f_{k+1}
    let mut f_k = 1e-300; // f_k at k = top
    let mut sum = (nu + 2.0 * jf) * g * f_k;
    let mut k = top;
    while k > 0 {
        let f_prev = 2.0 * (nu + k as f64) / z * f_k - f_next;
        f_next = f_k;
        f_k = f_prev;
        k -= 1;
        if k % 2 == 0 {
            let weight = if j == 1 {
                libm::tgamma(nu + 1.0)
            } else {
                g *= j as f64 / (nu + j as f64 - 1.0);
                (nu + 2.0 * (j - 1) as f64) * g
            };
            j -= 1;
            sum += weight * f_k;
        }
        if f_k.abs() > 1e250 {
            f_k *= 1e-250;
            f_next *= 1e-250;
            sum *= 1e-250;
        }
    }
    f_k * (0.5 * z).powf(nu) / sum
}

fn hankel(nu: f64, z: f64) -> f64 {
    let s = hankel_series(nu, Complex64::new(z, 0.0), 1.0);
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (Complex64::from_polar(1.0, chi) * s).re
}

/// Σ_k a_k(ν) (i·sign / w)^k summed to its smallest term, where
/// a_k = Π_{j≤k} (4ν² - (2j-1)²) / (k! 8^k).
pub fn hankel_series(nu: f64, w: Complex64, sign: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let x = Complex64::new(0.0, sign) / w;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= x * ((mu - odd * odd) / (8.0 * kf));
        let mag = term.norm();
        if mag == 0.0 {
            break;
        }
        if mag > last {
            break;
        }
        sum += term;
        last = mag;
        if mag <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Taylor coefficients of J_ν at z0 > 0, `c[k] = J_ν^(k)(z0)/k!`, generated
/// from Bessel's equation.
pub fn bessel_j_taylor(nu: f64, z0: f64) -> [f64; JET_LEN] {
    let mut c = [0.0; JET_LEN];
    c[0] = bessel_j_unchecked(nu, z0);
    c[1] = nu / z0 * c[0] - bessel_j_unchecked(nu + 1.0, z0);
    let a = z0 * z0;
    for k in 0..JET_LEN - 2 {
        let kf = k as f64;
        let mut rest = 2.0 * z0 * (kf + 1.0) * kf * c[k + 1]
            + kf * (kf - 1.0) * c[k]
            + z0 * (kf + 1.0) * c[k + 1]
            + kf * c[k]
            + (a - nu * nu) * c[k];
        if k >= 1 {
            rest += 2.0 * z0 * c[k - 1];
        }
        if k >= 2 {
            rest += c[k - 2];
        }
        c[k + 2] = -rest / (a * (kf + 2.0) * (kf + 1.0));
    }
    c
}

/// Jet of r ↦ r^{-ν} J_ν(ω r), an entire even function of r.
pub fn reduced_bessel_jet(nu: f64, omega: f64, r: Jet) -> Jet {
    let z0 = omega * r.value().re;
    if z0.abs() <= 4.0 {
        // Σ_m (-1)^m (ω/2)^{ν+2m} / (m! Γ(m+ν+1)) r^{2m}
        let h = 0.5 * omega;
        let mut coef = h.powf(nu) / libm::tgamma(nu + 1.0);
        let mut coefs = Vec::with_capacity(40);
        for m in 0..40 {
            coefs.push(coef);
            let mf = m as f64 + 1.0;
            coef *= -h * h / (mf * (mf + nu));
        }
        let r2 = r * r;
        let mut acc = Jet::zero();
        for c in coefs.iter().rev() {
            acc = acc * r2 + *c;
        }
        return acc;
    }
    let t = bessel_j_taylor(nu, z0);
    let taylor: [Complex64; JET_LEN] = std::array::from_fn(|k| Complex64::new(t[k], 0.0));
    (r * omega).compose(&taylor) * r.powf(-nu)
}

/// J_ν(w) for complex w, |arg w| < π/2, |w| large (Hankel expansion).
pub fn bessel_j_complex_asymptotic(nu: f64, w: Complex64) -> Complex64 {
    let phase = nu * FRAC_PI_2 + FRAC_PI_4;
    let pref = (Complex64::new(2.0 / PI, 0.0) / w).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let h1 = (i * (w - phase)).exp() * hankel_series(nu, w, 1.0);
    let h2 = (-i * (w - phase)).exp() * hankel_series(nu, w, -1.0);
    pref * (h1 + h2) * 0.5
}

/// J_ν(w) for complex w by the power series; accurate for moderate |w|.
pub fn bessel_j_complex_series(nu: f64, w: Complex64) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let h = w * 0.5;
    let mut term = h.powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for m in 1..500 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}
