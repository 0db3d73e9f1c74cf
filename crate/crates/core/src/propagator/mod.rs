//! Free Schrödinger evolution of radial data through the one-dimensional
//! representation
//!
//! ψ(x,t) = |x|^{(2-n)/2} (2t)^{-1} e^{i(|x|²/4t - nπ/4)} ∫_0^∞ φ_rad(r) r^{n/2} J_{(n-2)/2}(r|x|/2t) e^{ir²/4t} dr,
//!
//! plus an independent finite-volume time stepper used as an oracle.

pub mod decompose;
pub mod integral;
pub mod oracle;
pub mod profile;

pub use decompose::{decompose_g, solution_bound, solution_bound_truncated, GDecomposition};
pub use oracle::{evolve_oracle, evolve_oracle_report, OracleGrid, OracleReport};
pub use profile::{Family, RadialProfile, Support, TailTerm};

use crate::error::{Error, Result};
use crate::quad::QuadOptions;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint {
    pub n: usize,
    pub x_abs: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(n: usize, x_abs: f64, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if !(x_abs > 0.0 && x_abs.is_finite()) || !(t > 0.0 && t.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "need |x| > 0 and t > 0, got x={x_abs}, t={t}"
            )));
        }
        Ok(EvalPoint { n, x_abs, t })
    }

    /// |x| / 2t, the frequency of the Bessel kernel.
    pub fn k(&self) -> f64 {
        self.x_abs / (2.0 * self.t)
    }
}

/// ψ(x,t) with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAmplitude {
    pub value: Complex64,
    pub err_est: f64,
}

impl ComplexAmplitude {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

pub fn default_quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 100_000,
    }
}

pub fn evolve_radial(profile: &RadialProfile, pt: EvalPoint) -> Result<ComplexAmplitude> {
    evolve_radial_with(profile, pt, default_quad())
}

pub fn evolve_radial_with(
    profile: &RadialProfile,
    pt: EvalPoint,
    opts: QuadOptions,
) -> Result<ComplexAmplitude> {
    let EvalPoint { n, x_abs, t } = pt;
    let integral = integral::chirped_hankel(profile, n, pt.k(), 0.25 / t, opts)?;
    let nf = n as f64;
    let phase = x_abs * x_abs / (4.0 * t) - nf * FRAC_PI_4;
    let pref = Complex64::from_polar(x_abs.powf((2.0 - nf) / 2.0) / (2.0 * t), phase);
    let value = integral.value * pref;
    let err_est = integral.err * pref.norm();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite amplitude for {} at {pt:?}",
            profile.label()
        )));
    }
    Ok(ComplexAmplitude { value, err_est })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::bessel_j_unchecked;

    fn gaussian_exact(n: usize, x: f64, t: f64) -> Complex64 {
        let d = Complex64::new(1.0, 4.0 * t);
        d.powf(-(n as f64) / 2.0) * (-(x * x) / d).exp()
    }

    #[test]
    fn gaussian_closed_form() {
        let p = RadialProfile::gaussian(1.0).unwrap();
        for n in [2, 3, 4] {
            for &(x, t) in &[(0.3, 0.05), (1.0, 0.5), (2.5, 1.0), (7.0, 3.0)] {
                let v = evolve_radial(&p, EvalPoint::new(n, x, t).unwrap()).unwrap();
                let e = gaussian_exact(n, x, t);
                assert!(
                    (v.value - e).norm() < 1e-9,
                    "n={n} x={x} t={t}: {} vs {e}",
                    v.value
                );
            }
        }
    }

    #[test]
    fn herglotz_wave_is_stationary() {
        for (n, omega) in [(3, 1.0), (2, 1.0), (4, 2.0)] {
            let p = RadialProfile::herglotz(n, omega).unwrap();
            for &(x, t) in &[(0.7, 0.5), (2.0, 5.0), (9.0, 50.0), (3.0, 0.05)] {
                let v = evolve_radial(&p, EvalPoint::new(n, x, t).unwrap()).unwrap();
                let nu = (n as f64 - 2.0) / 2.0;
                let phi = x.powf(-nu) * bessel_j_unchecked(nu, omega * x);
                let expect = Complex64::from_polar(phi, -omega * omega * t);
                assert!(
                    (v.value - expect).norm() < 1e-8,
                    "n={n} x={x} t={t}: {} vs {expect}",
                    v.value
                );
            }
        }
    }

    #[test]
    fn global_phase_leaves_modulus_unchanged() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        let q = p.clone().with_amplitude(Complex64::from_polar(1.0, 0.83));
        let pt = EvalPoint::new(3, 1.4, 0.7).unwrap();
        let a = evolve_radial(&p, pt).unwrap().abs();
        let b = evolve_radial(&q, pt).unwrap().abs();
        assert!((a - b).abs() <= 1e-14 * a.max(1e-300));
    }

    #[test]
    fn rejects_divergent_tail() {
        let p = RadialProfile::power(0.2).unwrap();
        let err = evolve_radial(&p, EvalPoint::new(4, 1.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InadmissibleTail(_)));
    }

    #[test]
    fn small_time_recovers_datum() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        let x = 1.5;
        let v = evolve_radial(&p, EvalPoint::new(2, x, 1e-5).unwrap()).unwrap();
        assert!(
            (v.value - p.datum(x)).norm() < 1e-3,
            "{} vs {}",
            v.value,
            p.datum(x)
        );
    }
}
