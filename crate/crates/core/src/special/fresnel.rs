//! Iterated Fresnel integrals
//! Ξ^0_a(s) = ∫_s^∞ e^{i(ρ²+aρ)} dρ,  Ξ^m_a(s) = ∫_s^∞ Ξ^{m-1}_a(ρ) dρ.
//!
//! Ξ^m_0(s) = ∫_s^∞ (ρ-s)^m/m! e^{iρ²} dρ (Cauchy's repeated-integral formula).
//! For s ≥ 0 the ray ρ = s + u e^{iπ/4} turns the oscillation into Gaussian
//! decay. For s < 0 the integral is reassembled from values at 0 (closed
//! form) and at |s|. Nonzero a reduces to a = 0 by completing the square.

use crate::quad::{integrate_panels, QuadOptions};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::sync::OnceLock;

pub const MAX_TABLE_ORDER: usize = 6;

/// Grid of linear-phase parameters used for the recorded constants C_m.
pub const TABLE_A_GRID: [f64; 7] = [-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0];

fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, v| acc * v as f64)
}

/// Ξ^m_0(0) = e^{i(m+1)π/4} Γ((m+1)/2) / (2 m!).
pub fn xi_at_zero(m: usize) -> Complex64 {
    Complex64::from_polar(1.0, (m as f64 + 1.0) * FRAC_PI_4)
        * (libm::tgamma((m as f64 + 1.0) / 2.0) / (2.0 * factorial(m)))
}

fn xi_nonneg(m: usize, s: f64) -> Complex64 {
    // ∫_0^∞ u^m exp(-u² + √2 s u (i-1)) du
    let level = 50.0 + 3.0 * m as f64;
    let b = SQRT_2 * s;
    let upper = 0.5 * (-b + (b * b + 4.0 * level).sqrt());
    let coef = Complex64::new(-1.0, 1.0) * b;
    let mf = m as i32;
    let r = integrate_panels(
        |u| (coef * u - u * u).exp() * u.powi(mf),
        0.0,
        upper,
        4,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 10_000,
        },
    );
    Complex64::from_polar(1.0, (m as f64 + 1.0) * FRAC_PI_4 + s * s) * r.value / factorial(m)
}

/// Ξ^m_0(s) for any real s.
pub fn xi0(m: usize, s: f64) -> Complex64 {
    if s >= 0.0 {
        return xi_nonneg(m, s);
    }
    let sigma = -s;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..=m {
        let pw = sigma.powi((m - j) as i32) / factorial(m - j);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += xi_at_zero(j) * (pw * (1.0 + sign));
    }
    let outer_sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sum - xi_nonneg(m, sigma) * outer_sign
}

/// Ξ^m_a(s) = e^{-ia²/4} Ξ^m_0(s + a/2).
pub fn fresnel_xi(m: usize, a: f64, s: f64) -> Complex64 {
    Complex64::from_polar(1.0, -a * a / 4.0) * xi0(m, s + 0.5 * a)
}

/// sup over s ≥ 0 of |Ξ^m_a(s)| on a uniform s-grid of step `ds` over [0, s_max].
pub fn sup_over_s(m: usize, a: f64, s_max: f64, ds: f64) -> f64 {
    let steps = (s_max / ds).round() as usize;
    (0..=steps)
        .map(|i| fresnel_xi(m, a, i as f64 * ds).norm())
        .fold(0.0, f64::max)
}

/// Empirical constant C_m = max |Ξ^m_a(s)| over the a-grid and s ∈ [0, 50].
pub fn recorded_constant_on(m: usize, a_grid: &[f64]) -> f64 {
    a_grid
        .iter()
        .map(|&a| sup_over_s(m, a, 50.0, 0.1))
        .fold(0.0, f64::max)
}

/// Lazily computed table C_0..C_6.
pub fn recorded_constants() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_TABLE_ORDER)
            .map(|m| recorded_constant_on(m, &TABLE_A_GRID))
            .collect()
    })
}

/// Constant bounding |Ξ^m_a(s)| for s ≥ 0 and all |a| ≤ a_abs.
/// Uses the recorded table when a_abs is inside its grid, otherwise
/// evaluates the (attained) worst case at a = -a_abs directly.
pub fn constant_for(m: usize, a_abs: f64) -> f64 {
    let table = recorded_constants();
    let base = if m <= MAX_TABLE_ORDER {
        table[m]
    } else {
        recorded_constant_on(m, &TABLE_A_GRID)
    };
    if a_abs <= 100.0 {
        base
    } else {
        let s_max = 50.0f64.max(0.5 * a_abs + 10.0);
        base.max(sup_over_s(m, -a_abs, s_max, 0.1))
            .max(sup_over_s(m, a_abs, 50.0, 0.1))
    }
}
