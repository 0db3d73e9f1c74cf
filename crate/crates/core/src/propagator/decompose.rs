//! The splitting g = g_1 + g_2 + g_3 of the integrand in ρ = r / (2√t), the
//! phase-stripped parts g_{j,a_j}, and the resulting a-priori bound on |ψ|.

use super::profile::{RadialProfile, Support};
use super::EvalPoint;
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::quad::{integrate_doubling, integrate_panels, QuadOptions, TailIntegral};
use crate::special::bessel::bessel_j_unchecked;
use crate::special::fresnel::{constant_for, recorded_constants};
use crate::special::splitting::{alpha_coeffs, splitting_a_jet, splitting_b_jet, SplittingCoeffs};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct GDecomposition {
    profile: RadialProfile,
    pub n: usize,
    /// |x| / 2t
    pub k: f64,
    /// dr/dρ = 2√t
    pub slope: f64,
    /// a_1 = 2√t ω, a_2 = 2√t(ω + |x|/2t), a_3 = 2√t(ω - |x|/2t)
    pub a: [f64; 3],
    coeffs: SplittingCoeffs,
}

pub fn decompose_g(
    profile: &RadialProfile,
    pt: EvalPoint,
    k_trunc: usize,
) -> Result<GDecomposition> {
    let slope = 2.0 * pt.t.sqrt();
    let k = pt.k();
    let w = profile.omega();
    Ok(GDecomposition {
        profile: profile.clone(),
        n: pt.n,
        k,
        slope,
        a: [slope * w, slope * (w + k), slope * (w - k)],
        coeffs: alpha_coeffs(pt.n, k_trunc)?,
    })
}

impl GDecomposition {
    pub fn r_of(&self, rho: f64) -> f64 {
        self.slope * rho
    }

    /// Jet in ρ of g_{j,a_j} for j ∈ {1, 2, 3}.
    pub fn jet(&self, j: usize, rho: f64) -> Jet {
        let r = Jet::variable(self.r_of(rho), self.slope);
        let z = r * self.k;
        let scale = self.k.powf(-(self.n as f64) / 2.0);
        let part = match j {
            1 => splitting_a_jet(self.n, z),
            2 => splitting_b_jet(&self.coeffs, z),
            3 => splitting_b_jet(&self.coeffs, z).conj(),
            _ => panic!("g index {j} not in 1..=3"),
        };
        if part.is_zero() {
            return Jet::zero();
        }
        self.profile.envelope_jet(r) * part * scale
    }

    pub fn value(&self, j: usize, rho: f64) -> Complex64 {
        self.jet(j, rho).value()
    }

    /// m-th ρ-derivative of g_{j,a_j}.
    pub fn derivative(&self, j: usize, rho: f64, m: usize) -> Complex64 {
        self.jet(j, rho).derivative(m)
    }

    /// g(ρ) = φ_rad(r) r^{n/2} J_{(n-2)/2}(kr) evaluated directly.
    pub fn g(&self, rho: f64) -> Complex64 {
        let r = self.r_of(rho);
        let nf = self.n as f64;
        self.profile.datum(r)
            * (r.powf(nf / 2.0) * bessel_j_unchecked((nf - 2.0) / 2.0, self.k * r))
    }

    /// Σ_j g_{j,a_j}(ρ) e^{i a_j ρ}
    pub fn recombine(&self, rho: f64) -> Complex64 {
        (1..=3)
            .map(|j| self.value(j, rho) * Complex64::from_polar(1.0, self.a[j - 1] * rho))
            .sum()
    }

    /// ∫_0^{r_max/2√t} |g_{j,a_j}^{(m)}(ρ)| dρ; `None` as r_max means ∞.
    /// Returns `None` when the improper integral diverges.
    pub fn abs_derivative_integral(&self, j: usize, m: usize, r_max: Option<f64>) -> Option<f64> {
        let support = self.profile.support();
        let (mut lo, hi) = match support {
            Support::Compact { lo, hi } => (lo, Some(hi)),
            Support::Tail { lo, .. } => (lo, None),
        };
        let mut hi = match (hi, r_max) {
            (Some(h), Some(t)) => Some(h.min(t)),
            (Some(h), None) => Some(h),
            (None, t) => t,
        };
        // g_1 lives on kr ≤ 1, g_2 and g_3 on kr ≥ 1/2
        if j == 1 {
            let edge = 1.0 / self.k;
            hi = Some(hi.map_or(edge, |h| h.min(edge)));
        } else {
            lo = lo.max(0.5 / self.k);
        }
        let integrand =
            |r: f64| -> f64 { self.derivative(j, r / self.slope, m).norm() / self.slope };
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-8,
            max_intervals: 20_000,
        };
        match hi {
            Some(h) => {
                if h <= lo {
                    return Some(0.0);
                }
                let panels = (((h - lo) * (1.0 + self.k + self.profile.omega().abs())).ceil()
                    as usize)
                    .clamp(8, 20_000);
                Some(
                    integrate_panels(|r| Complex64::new(integrand(r), 0.0), lo, h, panels, opts)
                        .value
                        .re,
                )
            }
            None => {
                let split = lo.max(1.0 / self.k).max(1.0) * 2.0;
                let panels = (((split - lo) * (1.0 + self.k)).ceil() as usize).clamp(8, 20_000);
                let near = integrate_panels(
                    |r| Complex64::new(integrand(r), 0.0),
                    lo,
                    split,
                    panels,
                    opts,
                )
                .value
                .re;
                match integrate_doubling(integrand, split) {
                    TailIntegral::Finite { value, .. } => Some(near + value),
                    TailIntegral::Divergent => None,
                }
            }
        }
    }
}

/// C_{m-1} |x|^{(2-n)/2} t^{-1/2} (δ_{mn}|g_{1,a_1}^{(n-1)}(0)| + Σ_j ∫|g_{j,a_j}^{(m)}|).
/// Infinite when one of the integrals diverges.
pub fn solution_bound(profile: &RadialProfile, pt: EvalPoint, m: usize) -> Result<f64> {
    solution_bound_truncated(profile, pt, m, None)
}

/// Same as [`solution_bound`] with the ρ-integrals cut at r ≤ r_trunc.
pub fn solution_bound_truncated(
    profile: &RadialProfile,
    pt: EvalPoint,
    m: usize,
    r_trunc: Option<f64>,
) -> Result<f64> {
    let n = pt.n;
    if m > n || m > MAX_ORDER {
        return Err(Error::OutOfRange(format!(
            "bound order m={m} must satisfy m <= n = {n}"
        )));
    }
    let k_trunc = if n % 2 == 1 { 0 } else { 6 };
    let dec = decompose_g(profile, pt, k_trunc)?;
    let a_abs = dec.a.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    let c = if m == 0 {
        recorded_constants()[0]
    } else {
        constant_for(m - 1, a_abs)
    };
    let mut sum = 0.0;
    if m == n {
        sum += dec.derivative(1, 0.0, n - 1).norm();
    }
    for j in 1..=3 {
        match dec.abs_derivative_integral(j, m, r_trunc) {
            Some(v) => sum += v,
            None => return Ok(f64::INFINITY),
        }
    }
    let nf = n as f64;
    Ok(c * pt.x_abs.powf((2.0 - nf) / 2.0) / pt.t.sqrt() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::evolve_radial;

    #[test]
    fn phases_follow_definition() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap().with_carrier(1.5);
        let pt = EvalPoint::new(3, 2.0, 4.0).unwrap();
        let d = decompose_g(&p, pt, 0).unwrap();
        assert!((d.a[0] - 4.0 * 1.5).abs() < 1e-15);
        assert!((d.a[1] - 4.0 * (1.5 + 0.25)).abs() < 1e-15);
        assert!((d.a[2] - 4.0 * (1.5 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn recombination_reproduces_g() {
        let p = RadialProfile::gaussian(2.0).unwrap().with_carrier(0.7);
        let pt = EvalPoint::new(3, 3.0, 0.8).unwrap();
        let d = decompose_g(&p, pt, 0).unwrap();
        for i in 0..20 {
            let rho = 0.05 + 0.37 * i as f64;
            assert!((d.recombine(rho) - d.g(rho)).norm() < 1e-12 * (1.0 + d.g(rho).norm()));
        }
    }

    #[test]
    fn low_order_derivatives_vanish_at_origin() {
        let p = RadialProfile::gaussian(1.0).unwrap();
        for n in 2..=5 {
            let d = decompose_g(&p, EvalPoint::new(n, 1.0, 1.0).unwrap(), 2).unwrap();
            for j in 1..=3 {
                for m in 0..n - 1 {
                    assert!(d.derivative(j, 0.0, m).norm() < 1e-12, "n={n} j={j} m={m}");
                }
            }
            let top = d.derivative(1, 0.0, n - 1);
            if n == 2 {
                assert!(top.norm() > 1e-3);
            }
        }
    }

    #[test]
    fn bounds_dominate_modulus() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        for n in [2, 3] {
            for &(x, t) in &[(0.5, 0.3), (3.0, 1.0), (10.0, 2.0)] {
                let pt = EvalPoint::new(n, x, t).unwrap();
                let psi = evolve_radial(&p, pt).unwrap().abs();
                for m in 0..=n {
                    let b = solution_bound(&p, pt, m).unwrap();
                    assert!(b >= psi, "n={n} x={x} t={t} m={m}: {b} < {psi}");
                }
            }
        }
        assert!(solution_bound(&p, EvalPoint::new(2, 1.0, 1.0).unwrap(), 3).is_err());
    }
}
