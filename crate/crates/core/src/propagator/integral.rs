//! I(k, q) = ∫_0^∞ φ_rad(r) r^{n/2} J_{(n-2)/2}(k r) e^{i q r²} dr.
//!
//! The real-axis part runs over [lo, R0], where R0 lies beyond the profile's
//! tail start and beyond the point where the kernel's large-argument expansion
//! is accurate. Past R0 each tail term times each kernel branch e^{±ikr} leaves
//! the real axis: along the ray r = R0 + u e^{±iπ/4} when R0 is past the
//! stationary point, otherwise down a vertical leg onto the steepest-descent
//! line through the stationary point.

use super::profile::{RadialProfile, Support, TailTerm, ASYMPTOTIC_Z, HERGLOTZ_TAIL_K};
use crate::error::{Error, Result};
use crate::quad::{integrate_panels, QuadOptions, QuadResult};
use crate::special::bessel::bessel_j_unchecked;
use crate::special::splitting::{alpha_coeffs, SplittingCoeffs};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Decay level e^{-RAY_LEVEL} at which rotated rays are cut off.
const RAY_LEVEL: f64 = 50.0;
const MAX_INITIAL_PANELS: usize = 50_000;
/// Largest |kr| at which the kernel power series is used off the real axis.
const NEAR_Z: f64 = 12.0;

struct Branch {
    term: TailTerm,
    sign: f64,
    quad: f64,
    lin: f64,
}

fn kernel_coeffs(n: usize) -> SplittingCoeffs {
    let k = if n % 2 == 1 { 0 } else { HERGLOTZ_TAIL_K };
    alpha_coeffs(n, k).expect("dimension checked by caller")
}

fn panel_count(a: f64, b: f64, quad: f64, lin: f64) -> usize {
    let phase = quad.abs() * (b * b - a * a).abs() + lin.abs() * (b - a).abs();
    ((phase / PI).ceil() as usize + 4).min(MAX_INITIAL_PANELS)
}

/// Kernel value r^{n/2} J_ν(kr) on the real axis.
fn kernel(nu: f64, half_n: f64, k: f64, r: f64) -> f64 {
    r.powf(half_n) * bessel_j_unchecked(nu, k * r)
}

pub fn chirped_hankel(
    profile: &RadialProfile,
    n: usize,
    k: f64,
    q: f64,
    opts: QuadOptions,
) -> Result<QuadResult> {
    chirped_hankel_routed(profile, n, k, q, opts, true)
}

fn chirped_hankel_routed(
    profile: &RadialProfile,
    n: usize,
    k: f64,
    q: f64,
    opts: QuadOptions,
    allow_near: bool,
) -> Result<QuadResult> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "kernel frequency must be positive, got {k}"
        )));
    }
    let nf = n as f64;
    let nu = (nf - 2.0) / 2.0;
    let half_n = nf / 2.0;
    let omega = profile.omega();
    // the datum's own chirp merges with e^{iqr²} before any phase is formed
    let net_q = q + profile.chirp_rate();
    let direct = |r: f64| -> Complex64 {
        if r <= 0.0 {
            return ZERO;
        }
        let d = profile.dechirped(r);
        if d == ZERO {
            return ZERO;
        }
        d * kernel(nu, half_n, k, r) * Complex64::from_polar(1.0, net_q * r * r)
    };
    match profile.support() {
        Support::Compact { lo, hi } => {
            let panels = panel_count(lo, hi, net_q, k + omega.abs() + 1.0);
            Ok(integrate_panels(direct, lo, hi, panels, opts))
        }
        Support::Tail { lo, start } => {
            let terms = profile.tail_terms();
            for t in &terms {
                if t.power + (nf - 1.0) / 2.0 >= 1.0 {
                    return Err(Error::InadmissibleTail(format!(
                        "{}: amplitude grows like r^{} against the kernel; the oscillatory integral diverges",
                        profile.label(),
                        t.power
                    )));
                }
            }
            if let Some(near) = allow_near
                .then(|| near_field(profile, n, k, q, &terms, &direct, opts))
                .flatten()
            {
                return Ok(near);
            }
            let z_b = if n % 2 == 1 { 1.0 } else { ASYMPTOTIC_Z };
            let r0 = start.max(lo).max(z_b / k);
            let mut branches = Vec::with_capacity(2 * terms.len());
            for t in &terms {
                for sign in [1.0, -1.0] {
                    let quad = q + t.chirp;
                    let lin = t.carrier + omega + sign * k;
                    if quad.abs() <= 1e-14 * (1.0 + q.abs()) {
                        return Err(Error::Numerical(format!(
                            "{}: quadratic phase cancels (q = {q}); rotation undefined",
                            profile.label()
                        )));
                    }
                    branches.push(Branch {
                        term: t.clone(),
                        sign,
                        quad,
                        lin,
                    });
                }
            }
            let max_lin = branches
                .iter()
                .map(|b| b.lin.abs())
                .fold(k + omega.abs(), f64::max);
            let max_quad = branches
                .iter()
                .map(|b| b.quad.abs())
                .fold(net_q.abs(), f64::max);
            let mut total = real_segment(profile, n, &direct, lo, r0, max_quad, max_lin, opts);
            let coeffs = kernel_coeffs(n);
            let k_pref = k.powf(-half_n);
            for br in &branches {
                let amp = &br.term.amplitude;
                let h = |r: Complex64| -> Complex64 {
                    let w = r * k;
                    let s = if br.sign > 0.0 {
                        coeffs.series(w)
                    } else {
                        coeffs.series_conj(w)
                    };
                    amp(r) * s * k_pref
                };
                total = total.add(Contour::new(br.quad, br.lin, r0).integrate(h, opts));
            }
            if n % 2 == 0 {
                // next term of the kernel expansion at the smallest argument used
                let next = alpha_coeffs(n, HERGLOTZ_TAIL_K + 1)?.alpha[HERGLOTZ_TAIL_K + 1].norm();
                let z0 = k * r0;
                let env = profile.envelope(r0.max(1e-300)).norm();
                let width = (PI / max_quad).sqrt();
                total.err += env
                    * k_pref
                    * next
                    * z0.powf((nf - 1.0) / 2.0 - HERGLOTZ_TAIL_K as f64 - 1.0)
                    * width;
            }
            Ok(total)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn real_segment<F: Fn(f64) -> Complex64>(
    profile: &RadialProfile,
    n: usize,
    direct: &F,
    lo: f64,
    hi: f64,
    quad: f64,
    lin: f64,
    opts: QuadOptions,
) -> QuadResult {
    if hi <= lo {
        return QuadResult::zero();
    }
    let mut start = lo;
    let mut acc = QuadResult::zero();
    if let (Some(e), true) = (profile.origin_power(), lo == 0.0) {
        let p = e + n as f64 - 1.0;
        if p < 0.0 {
            // r = v^β removes the r^p endpoint singularity
            let beta = 1.0 / (p + 1.0);
            let r_sub = hi.min(1.0);
            let v_max = r_sub.powf(1.0 / beta);
            acc = integrate_panels(
                |v: f64| {
                    if v <= 0.0 {
                        return ZERO;
                    }
                    direct(v.powf(beta)) * (beta * v.powf(beta - 1.0))
                },
                0.0,
                v_max,
                4,
                opts,
            );
            start = r_sub;
        }
    }
    let panels = panel_count(start, hi, quad, lin + 1.0);
    acc.add(integrate_panels(direct, start, hi, panels, opts))
}

/// Contour from r0 to ∞ on which |e^{i(quad r² + lin r)}| decays to e^{-RAY_LEVEL}.
enum Path {
    /// r = r0 + u e^{iσπ/4}, u ∈ [0, u_max]; r0 at or past the stationary point.
    Ray { u_max: f64 },
    /// r = r0 - iσv, v ∈ [0, v_max], then r = saddle + s e^{iσπ/4}, s ∈ [s_lo, s_cut].
    Saddle {
        saddle: f64,
        v_max: f64,
        s_lo: f64,
        s_cut: f64,
    },
}

struct Contour {
    quad: f64,
    lin: f64,
    r0: f64,
    path: Path,
}

impl Contour {
    fn new(quad: f64, lin: f64, r0: f64) -> Self {
        let qa = quad.abs();
        let saddle = -lin / (2.0 * quad);
        let d = r0 - saddle;
        let path = if d >= 0.0 {
            let slope = (2.0 * quad * r0 + lin).abs() / SQRT_2;
            let u_max = (-slope + (slope * slope + 4.0 * qa * RAY_LEVEL).sqrt()) / (2.0 * qa);
            Path::Ray { u_max }
        } else {
            // on the leg |e^{iφ}| = e^{-2|quad||d| v}, on the line e^{-|quad| s²}
            let s_cut = (RAY_LEVEL / qa).sqrt();
            Path::Saddle {
                saddle,
                v_max: (-d).min(RAY_LEVEL / (2.0 * qa * -d)),
                s_lo: (SQRT_2 * d).max(-s_cut),
                s_cut,
            }
        };
        Contour {
            quad,
            lin,
            r0,
            path,
        }
    }

    fn dir(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.quad.signum() * FRAC_PI_4)
    }

    /// Largest |r| on the contour.
    fn extent(&self) -> f64 {
        let dir = self.dir();
        match self.path {
            Path::Ray { u_max } => (dir * u_max + self.r0).norm(),
            Path::Saddle {
                saddle,
                v_max,
                s_lo,
                s_cut,
            } => [
                Complex64::new(self.r0, -self.quad.signum() * v_max),
                dir * s_lo + saddle,
                dir * s_cut + saddle,
            ]
            .iter()
            .fold(self.r0, |m, r| m.max(r.norm())),
        }
    }

    /// ∫ h(r) e^{i(quad r² + lin r)} dr along the contour, for h analytic near it.
    fn integrate<H: Fn(Complex64) -> Complex64>(&self, h: H, opts: QuadOptions) -> QuadResult {
        let i = Complex64::new(0.0, 1.0);
        let (quad, lin) = (self.quad, self.lin);
        let f = |r: Complex64, dr: Complex64| {
            let v = h(r) * (i * (r * r * quad + r * lin)).exp() * dr;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                ZERO
            }
        };
        let dir = self.dir();
        match self.path {
            Path::Ray { u_max } => {
                integrate_panels(|u| f(dir * u + self.r0, dir), 0.0, u_max, 8, opts)
            }
            Path::Saddle {
                saddle,
                v_max,
                s_lo,
                s_cut,
            } => {
                let down = Complex64::new(0.0, -quad.signum());
                let leg = integrate_panels(|v| f(down * v + self.r0, down), 0.0, v_max, 8, opts);
                let line = integrate_panels(|s| f(dir * s + saddle, dir), s_lo, s_cut, 8, opts);
                leg.add(line)
            }
        }
    }
}

/// r^{n/2} J_ν(kr) for complex r from the power series of the entire factor.
fn kernel_entire(n: usize, k: f64, r: Complex64) -> Complex64 {
    let nu = (n as f64 - 2.0) / 2.0;
    let h = r * k * 0.5;
    let q = -h * h;
    let mut term = Complex64::new(1.0 / libm::tgamma(nu + 1.0), 0.0);
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * r.powi(n as i32 - 1) * (k / 2.0).powf(nu)
}

/// Whole tail on contours leaving the real axis at the tail start, with the
/// exact kernel; applies only while every contour stays inside |kr| ≤ NEAR_Z.
fn near_field<F: Fn(f64) -> Complex64>(
    profile: &RadialProfile,
    n: usize,
    k: f64,
    q: f64,
    terms: &[TailTerm],
    direct: &F,
    opts: QuadOptions,
) -> Option<QuadResult> {
    let Support::Tail { lo, start } = profile.support() else {
        return None;
    };
    let s = start.max(lo);
    let omega = profile.omega();
    let mut contours = Vec::with_capacity(terms.len());
    for t in terms {
        let quad = q + t.chirp;
        if quad.abs() <= 1e-14 * (1.0 + q.abs()) {
            return None;
        }
        let c = Contour::new(quad, t.carrier + omega, s);
        if k * c.extent() > NEAR_Z {
            return None;
        }
        contours.push((t, c));
    }
    let net_q = q + profile.chirp_rate();
    let mut total = real_segment(profile, n, direct, lo, s, net_q.abs(), k + omega.abs(), opts);
    for (t, c) in contours {
        let amp = &t.amplitude;
        total = total.add(c.integrate(|r| amp(r) * kernel_entire(n, k, r), opts));
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_field_matches_descent_route() {
        let opts = QuadOptions::default();
        let power = || RadialProfile::power(2.5).unwrap();
        let cases = [
            (power(), 2, 0.05, 0.01),
            (power(), 2, 0.02, -0.004),
            (power(), 3, 0.05, 0.01),
            (power(), 3, 0.02, -0.004),
            (RadialProfile::herglotz(2, 1.0).unwrap(), 2, 0.01, 0.01),
            (RadialProfile::herglotz(3, 1.0).unwrap(), 3, 0.01, -0.01),
            (
                RadialProfile::power(3.0).unwrap().with_carrier(0.3),
                2,
                0.05,
                0.01,
            ),
        ];
        for (profile, n, k, q) in cases {
            let terms = profile.tail_terms();
            let direct = |_: f64| ZERO;
            assert!(near_field(&profile, n, k, q, &terms, &direct, opts).is_some());
            let near = chirped_hankel_routed(&profile, n, k, q, opts, true).unwrap();
            let far = chirped_hankel_routed(&profile, n, k, q, opts, false).unwrap();
            let diff = (near.value - far.value).norm();
            assert!(
                diff < 1e-9 * far.value.norm(),
                "{} n={n} k={k} q={q}: {diff:e}",
                profile.label()
            );
        }
    }

    #[test]
    fn entire_kernel_matches_real_bessel() {
        for n in 2..=5 {
            let nu = (n as f64 - 2.0) / 2.0;
            for r in [0.3, 2.0, 7.5] {
                let exact = kernel(nu, n as f64 / 2.0, 1.3, r);
                let series = kernel_entire(n, 1.3, Complex64::new(r, 0.0));
                assert!(
                    (series.re - exact).abs() < 1e-12 * (1.0 + exact.abs()) && series.im == 0.0
                );
            }
        }
    }
}
