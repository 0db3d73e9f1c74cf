//! The cutoff splitting z^{n/2} J_{(n-2)/2}(z) = A_n(z) + e^{iz} B_n(z) + e^{-iz} conj(B_n(z)).

use super::bessel::{bessel_j_unchecked, BesselOrder};
use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Hard cap on the asymptotic truncation order accepted by the residual check.
pub const K_CAP: usize = 12;

/// Coefficients α_0..α_K of the large-argument expansion in dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingCoeffs {
    pub n: usize,
    pub k: usize,
    pub alpha: Vec<Complex64>,
    /// e^{-i(n-1)π/4}
    pub phase: Complex64,
}

/// (ν,k) = (4ν²-1²)(4ν²-3²)···(4ν²-(2k-1)²) / (4^k k!)
pub fn nu_symbol(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    (1..=k).fold(1.0, |acc, j| {
        let odd = (2 * j - 1) as f64;
        acc * (mu - odd * odd) / (4.0 * j as f64)
    })
}

pub fn alpha_coeffs(n: usize, k: usize) -> Result<SplittingCoeffs> {
    let nu = BesselOrder::from_dimension(n)?.nu();
    let a0 = 1.0 / (2.0 * PI).sqrt();
    let half_i = Complex64::new(0.0, 0.5);
    let alpha = (0..=k)
        .map(|j| half_i.powu(j as u32) * (a0 * nu_symbol(nu, j)))
        .collect();
    Ok(SplittingCoeffs {
        n,
        k,
        alpha,
        phase: Complex64::from_polar(1.0, -((n as f64 - 1.0) * PI / 4.0)),
    })
}

impl SplittingCoeffs {
    fn exponent(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    /// Index of the last nonzero coefficient; for odd n the series terminates.
    pub fn effective_len(&self) -> usize {
        self.alpha
            .iter()
            .rposition(|a| *a != Complex64::new(0.0, 0.0))
            .map_or(0, |i| i + 1)
    }

    /// e^{-i(n-1)π/4} Σ α_k w^{(n-1)/2-k} without the cutoff, analytic in w off
    /// the negative axis.
    pub fn series(&self, w: Complex64) -> Complex64 {
        let p = self.exponent();
        let inv = w.inv();
        let mut pw = w.powf(p);
        let mut sum = Complex64::new(0.0, 0.0);
        for a in &self.alpha[..self.effective_len()] {
            sum += a * pw;
            pw *= inv;
        }
        self.phase * sum
    }

    /// Analytic continuation of conj(series(w)) from the positive axis.
    pub fn series_conj(&self, w: Complex64) -> Complex64 {
        let p = self.exponent();
        let inv = w.inv();
        let mut pw = w.powf(p);
        let mut sum = Complex64::new(0.0, 0.0);
        for a in &self.alpha[..self.effective_len()] {
            sum += a.conj() * pw;
            pw *= inv;
        }
        self.phase.conj() * sum
    }

    pub fn series_jet(&self, z: Jet) -> Jet {
        let p = self.exponent();
        let lnz = z.ln();
        let mut sum = Jet::zero();
        for (k, a) in self.alpha[..self.effective_len()].iter().enumerate() {
            sum = sum + lnz.scale_re(p - k as f64).exp().scale(*a);
        }
        sum.scale(self.phase)
    }
}

fn smooth_step_f(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// χ(z) = S(2(1-z)), S(u) = f(u)/(f(u)+f(1-u)), f(u) = e^{-1/u} for u > 0.
pub fn cutoff_chi(z: f64) -> f64 {
    if z <= 0.5 {
        return 1.0;
    }
    if z >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * (1.0 - z);
    let a = smooth_step_f(u);
    let b = smooth_step_f(1.0 - u);
    a / (a + b)
}

pub fn cutoff_chi_jet(z: Jet) -> Jet {
    let z0 = z.value().re;
    if z0 <= 0.5 {
        return Jet::real(1.0);
    }
    if z0 >= 1.0 {
        return Jet::zero();
    }
    let u = (z * -2.0) + 2.0;
    let fu = u.recip().scale_re(-1.0).exp();
    let v = (u * -1.0) + 1.0;
    let fv = v.recip().scale_re(-1.0).exp();
    fu / (fu + fv)
}

/// Taylor coefficients of z^{n/2} J_{(n-2)/2}(z) = Σ_m c_m z^{n-1+2m}.
fn a_series_coeffs(n: usize) -> Vec<f64> {
    let nu = (n as f64 - 2.0) / 2.0;
    (0..30)
        .map(|m| {
            let mf = m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign / (2f64.powf(nu + 2.0 * mf)
                * libm::tgamma(mf + 1.0)
                * libm::tgamma(mf + n as f64 / 2.0))
        })
        .collect()
}

/// A_n(z) = χ(z) z^{n/2} J_{(n-2)/2}(z).
pub fn splitting_a(n: usize, z: f64) -> Result<f64> {
    let nu = BesselOrder::from_dimension(n)?.nu();
    if z < 0.0 {
        return Err(Error::OutOfRange(format!(
            "splitting_a needs z >= 0, got {z}"
        )));
    }
    let chi = cutoff_chi(z);
    if chi == 0.0 {
        return Ok(0.0);
    }
    Ok(chi * z.powf(n as f64 / 2.0) * bessel_j_unchecked(nu, z))
}

/// Jet of A_n at a real expansion point z ≥ 0 (support [0,1], so the power
/// series converges quickly).
pub fn splitting_a_jet(n: usize, z: Jet) -> Jet {
    let chi = cutoff_chi_jet(z);
    if chi.is_zero() {
        return Jet::zero();
    }
    let c = a_series_coeffs(n);
    let z2 = z * z;
    let mut poly = Jet::zero();
    for coef in c.iter().rev() {
        poly = poly * z2 + *coef;
    }
    chi * z.powi(n as u32 - 1) * poly
}

/// A_n(z) z^{1-n} = χ(z) Σ_m c_m z^{2m}, regular at the origin.
pub fn splitting_a_reduced(n: usize, z: f64) -> f64 {
    let chi = cutoff_chi(z);
    if chi == 0.0 {
        return 0.0;
    }
    let z2 = z * z;
    chi * a_series_coeffs(n)
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * z2 + c)
}

pub fn splitting_a_reduced_jet(n: usize, z: Jet) -> Jet {
    let chi = cutoff_chi_jet(z);
    if chi.is_zero() {
        return Jet::zero();
    }
    let z2 = z * z;
    let mut poly = Jet::zero();
    for coef in a_series_coeffs(n).iter().rev() {
        poly = poly * z2 + *coef;
    }
    chi * poly
}

/// B_n(z) with the series truncated after α_K.
pub fn splitting_b(n: usize, k: usize, z: f64) -> Result<Complex64> {
    let coeffs = alpha_coeffs(n, k)?;
    Ok(splitting_b_with(&coeffs, z))
}

pub fn splitting_b_with(coeffs: &SplittingCoeffs, z: f64) -> Complex64 {
    let w = 1.0 - cutoff_chi(z);
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    coeffs.series(Complex64::new(z, 0.0)) * w
}

pub fn splitting_b_jet(coeffs: &SplittingCoeffs, z: Jet) -> Jet {
    let w = (cutoff_chi_jet(z) * -1.0) + 1.0;
    if w.is_zero() {
        return Jet::zero();
    }
    w * coeffs.series_jet(z)
}

/// Largest admissible truncation at z: floor(z) - 1, capped at 12.
pub fn k_max(z: f64) -> usize {
    let f = z.floor() - 1.0;
    if f < 0.0 {
        0
    } else {
        (f as usize).min(K_CAP)
    }
}

/// |z^{n/2} J - A_n - 2 Re(e^{iz} B_n^{(K)})| for z ≥ 2.
pub fn splitting_residual(n: usize, k: usize, z: f64) -> Result<f64> {
    if z < 2.0 {
        return Err(Error::OutOfRange(format!(
            "splitting_residual needs z >= 2, got {z}"
        )));
    }
    let km = k_max(z);
    if k > km {
        return Err(Error::TruncationTooLarge { k, k_max: km, z });
    }
    let coeffs = alpha_coeffs(n, k)?;
    let nu = coeffs_nu(n);
    let exact = z.powf(n as f64 / 2.0) * bessel_j_unchecked(nu, z);
    let a = splitting_a(n, z)?;
    let b = splitting_b_with(&coeffs, z);
    let osc = 2.0 * (Complex64::from_polar(1.0, z) * b).re;
    Ok((exact - a - osc).abs())
}

fn coeffs_nu(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_examples() {
        let a0 = 1.0 / (2.0 * PI).sqrt();
        for n in 2..7 {
            let c = alpha_coeffs(n, 4).unwrap();
            assert!((c.alpha[0] - Complex64::new(a0, 0.0)).norm() < 1e-16);
        }
        let c3 = alpha_coeffs(3, 6).unwrap();
        assert!(c3.alpha[1..].iter().all(|a| *a == Complex64::new(0.0, 0.0)));
        let c2 = alpha_coeffs(2, 1).unwrap();
        let expected = Complex64::new(0.0, 0.5) * (a0 * -0.25);
        assert!((c2.alpha[1] - expected).norm() < 1e-16);
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(cutoff_chi(0.25), 1.0);
        assert_eq!(cutoff_chi(2.0), 0.0);
        assert!((cutoff_chi(0.75) - 0.5).abs() < 1e-15);
        for i in 0..100 {
            let z = 0.5 + 0.005 * i as f64;
            assert!(cutoff_chi(z) >= cutoff_chi(z + 0.005));
        }
    }

    #[test]
    fn cutoff_jet_matches_finite_difference() {
        for &z in &[0.55, 0.7, 0.9] {
            let j = cutoff_chi_jet(Jet::variable(z, 1.0));
            let h = 1e-5;
            let fd = (cutoff_chi(z + h) - cutoff_chi(z - h)) / (2.0 * h);
            assert!((j.derivative(1).re - fd).abs() < 1e-7);
            assert!((j.value().re - cutoff_chi(z)).abs() < 1e-15);
        }
    }

    #[test]
    fn a_examples() {
        assert_eq!(splitting_a(2, 0.0).unwrap(), 0.0);
        assert_eq!(splitting_a(2, 1.5).unwrap(), 0.0);
        let z: f64 = 0.25;
        let expected = z.powf(1.5) * bessel_j_unchecked(0.5, z);
        assert!((splitting_a(3, z).unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn a_jet_value_matches_direct() {
        for n in 2..6 {
            for &z in &[0.1, 0.4, 0.6, 0.85] {
                let j = splitting_a_jet(n, Jet::variable(z, 1.0));
                assert!((j.value().re - splitting_a(n, z).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reduced_a_consistent() {
        for n in 2..6 {
            let z: f64 = 0.62;
            let full = splitting_a(n, z).unwrap();
            assert!((splitting_a_reduced(n, z) * z.powi(n as i32 - 1) - full).abs() < 1e-15);
        }
    }

    #[test]
    fn b_examples() {
        let a0 = 1.0 / (2.0 * PI).sqrt();
        let b = splitting_b(3, 4, 10.0).unwrap();
        let expected = Complex64::new(0.0, -1.0) * (a0 * 10.0);
        assert!((b - expected).norm() < 1e-14);
        assert_eq!(splitting_b(2, 3, 0.4).unwrap(), Complex64::new(0.0, 0.0));
        let b2 = splitting_b(2, 0, 4.0).unwrap();
        let e2 = Complex64::from_polar(1.0, -PI / 4.0) * (a0 * 2.0);
        assert!((b2 - e2).norm() < 1e-15);
    }

    #[test]
    fn residual_guard_rejects_large_k() {
        assert!(matches!(
            splitting_residual(2, 5, 4.5),
            Err(Error::TruncationTooLarge { .. })
        ));
        assert!(splitting_residual(2, 0, 1.5).is_err());
        assert!(splitting_residual(3, 1, 20.0).unwrap() <= 1e-10);
    }

    #[test]
    fn series_conj_is_conjugate_on_real_axis() {
        let c = alpha_coeffs(4, 6).unwrap();
        let w = Complex64::new(37.0, 0.0);
        assert!((c.series_conj(w) - c.series(w).conj()).norm() < 1e-12);
    }
}
