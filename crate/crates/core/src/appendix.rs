//! The singular Herglotz superposition
//! φ(x) = |x|^{(2−n)/2} ∫_1^2 (ω−1)^{−δ} J_ν(ω|x|) dω, its free evolution,
//! and the necessary conditions on (p, q, r) that it produces.
//!
//! The endpoint singularity is removed by u = ω−1 = v^β with β = 1/(1−δ),
//! which turns u^{−δ} du into β dv. Large |x| and large t are handled by
//! moving the ω contour off the real axis.

use crate::blowup::{sphere_area, Exponent};
use crate::decay::{fit_envelope, Axis, DecayFit};
use crate::error::{Error, Result};
use crate::norms::NormValue;
use crate::quad::{block_slope, gauss_laguerre, gauss_legendre, integrate_panels, QuadOptions, DIVERGENCE_SLOPE};
use crate::special::bessel::{bessel_j_unchecked, hankel_series};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::rc::Rc;

/// |x| from which φ is evaluated on the Hankel contours.
pub const HANKEL_SPLIT: f64 = 40.0;
/// Largest |x| for which ψ uses the rotated ω contour.
pub const ROTATE_MAX_X: f64 = 2.0;
/// Smallest t for which ψ uses the rotated ω contour.
pub const ROTATE_MIN_T: f64 = 5.0;
/// Exponential decay level at which the rotated contours are cut.
const CUT_LEVEL: f64 = 40.0;
/// Doubling blocks used for L^r membership.
pub const LR_BLOCKS: usize = 13;
const LR_SLOPE_WINDOW: usize = 6;

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-11,
        max_intervals: 200_000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularDensity {
    pub delta: f64,
}

impl SingularDensity {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta < 1.0 {
            Ok(SingularDensity { delta })
        } else {
            Err(Error::OutOfRange(format!("delta must lie in (0, 1), got {delta}")))
        }
    }

    fn beta(&self) -> f64 {
        1.0 / (1.0 - self.delta)
    }

    /// a(ω) = (ω−1)^{−δ} on (1, 2], zero elsewhere.
    pub fn density(&self, omega: f64) -> f64 {
        if omega > 1.0 && omega <= 2.0 {
            (omega - 1.0).powf(-self.delta)
        } else {
            0.0
        }
    }

    /// Radial Fourier transform |ξ|^{−n/2} a(|ξ|) (unitary normalisation).
    pub fn fourier(&self, n: usize, xi: f64) -> f64 {
        xi.powf(-(n as f64) / 2.0) * self.density(xi)
    }
}

fn order(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok((n as f64 - 2.0) / 2.0)
}

/// |x|^{−ν} J_ν(ω|x|), continuous at x = 0.
fn reduced_j(nu: f64, omega: f64, x: f64) -> f64 {
    if x == 0.0 {
        (omega / 2.0).powf(nu) / libm::tgamma(nu + 1.0)
    } else {
        x.powf(-nu) * bessel_j_unchecked(nu, omega * x)
    }
}

/// |x|^{−ν} J_ν(ω|x|) for complex ω with Re ω > 0, by the entire series.
fn reduced_j_complex(nu: f64, omega: Complex64, x: f64) -> Complex64 {
    let h = omega * x * 0.5;
    let q = -h * h;
    let mut term = Complex64::new(1.0 / libm::tgamma(nu + 1.0), 0.0);
    let mut sum = term;
    for m in 1..400 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    (omega * 0.5).powf(nu) * sum
}

/// Amplitude A_s(w) with J_ν(w) = Σ_{s=±1} A_s(w) e^{isw}.
fn hankel_amplitude(nu: f64, w: Complex64, s: f64) -> Complex64 {
    let phase = nu * FRAC_PI_2 + FRAC_PI_4;
    let pref = (Complex64::new(2.0 / PI, 0.0) / w).sqrt() * 0.5;
    pref * Complex64::from_polar(1.0, -s * phase) * hankel_series(nu, w, s)
}

/// φ(|x|). Bounded at the origin.
pub fn singular_phi(delta: f64, n: usize, x_abs: f64) -> Result<Complex64> {
    let dens = SingularDensity::new(delta)?;
    let nu = order(n)?;
    if !(x_abs >= 0.0) || !x_abs.is_finite() {
        return Err(Error::OutOfRange(format!("|x| must be finite and >= 0, got {x_abs}")));
    }
    if x_abs >= HANKEL_SPLIT {
        Ok(phi_hankel(dens, nu, x_abs))
    } else {
        Ok(phi_direct(dens, nu, x_abs))
    }
}

/// Real-line quadrature in the v variable.
pub(crate) fn phi_direct(dens: SingularDensity, nu: f64, x: f64) -> Complex64 {
    let beta = dens.beta();
    let panels = (x / 2.0).ceil() as usize + 4;
    let r = integrate_panels(
        |v| Complex64::new(reduced_j(nu, 1.0 + v.powf(beta), x), 0.0),
        0.0,
        1.0,
        panels,
        quad_opts(),
    );
    r.value * beta
}

/// Laguerre nodes for the two Hankel contour legs.
pub const LAGUERRE_NODES: usize = 40;

struct LaguerreRules {
    corner: (Vec<f64>, Vec<f64>),
    plain: (Vec<f64>, Vec<f64>),
}

thread_local! {
    static RULES: RefCell<HashMap<u64, Rc<LaguerreRules>>> = RefCell::new(HashMap::new());
}

fn laguerre_rules(delta: f64) -> Rc<LaguerreRules> {
    RULES.with(|cell| {
        cell.borrow_mut()
            .entry(delta.to_bits())
            .or_insert_with(|| {
                Rc::new(LaguerreRules {
                    corner: gauss_laguerre(LAGUERRE_NODES, -delta),
                    plain: gauss_laguerre(LAGUERRE_NODES, 0.0),
                })
            })
            .clone()
    })
}

/// ∫_0^1 = ∫_0^{i∞} − ∫_1^{1+i∞} on the e^{iωx} branch; φ is real and the
/// e^{−iωx} branch is its conjugate. With ω = 1 + iy/x (resp. 2 + iy/x) both
/// legs carry the weight e^{−y}, and the first also y^{−δ}.
pub(crate) fn phi_hankel(dens: SingularDensity, nu: f64, x: f64) -> Complex64 {
    let delta = dens.delta;
    let rules = laguerre_rules(delta);
    let i = Complex64::new(0.0, 1.0);
    let mut near = Complex64::new(0.0, 0.0);
    for (&y, &w) in rules.corner.0.iter().zip(&rules.corner.1) {
        near += hankel_amplitude(nu, Complex64::new(x, y), 1.0) * w;
    }
    near *= i * Complex64::from_polar(x.powf(delta - 1.0), x - FRAC_PI_2 * delta);
    let mut far = Complex64::new(0.0, 0.0);
    for (&y, &w) in rules.plain.0.iter().zip(&rules.plain.1) {
        far += Complex64::new(1.0, y / x).powf(-delta) * hankel_amplitude(nu, Complex64::new(2.0 * x, y), 1.0) * w;
    }
    far *= i * Complex64::from_polar(1.0 / x, 2.0 * x);
    Complex64::new(2.0 * (near - far).re * x.powf(-nu), 0.0)
}

/// ψ(|x|, t), the free evolution of φ with Fourier data e^{−it|ξ|²} φ̂.
pub fn singular_psi(delta: f64, n: usize, x_abs: f64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::OutOfRange(format!("t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return singular_phi(delta, n, x_abs);
    }
    let dens = SingularDensity::new(delta)?;
    let nu = order(n)?;
    if !(x_abs >= 0.0) || !x_abs.is_finite() {
        return Err(Error::OutOfRange(format!("|x| must be finite and >= 0, got {x_abs}")));
    }
    if x_abs <= ROTATE_MAX_X && t >= ROTATE_MIN_T {
        Ok(psi_rotated(dens, nu, x_abs, t))
    } else {
        Ok(psi_direct(dens, nu, x_abs, t))
    }
}

pub(crate) fn psi_direct(dens: SingularDensity, nu: f64, x: f64, t: f64) -> Complex64 {
    let beta = dens.beta();
    let panels = ((3.0 * t + x) / 2.0).ceil() as usize + 4;
    let r = integrate_panels(
        |v| {
            let omega = 1.0 + v.powf(beta);
            Complex64::from_polar(reduced_j(nu, omega, x), -t * omega * omega)
        },
        0.0,
        1.0,
        panels,
        quad_opts(),
    );
    r.value * beta
}

/// ∫_1^2 = ∫_1^{1−i∞} − ∫_2^{2−i∞}; e^{−itω²} decays in the fourth quadrant.
pub(crate) fn psi_rotated(dens: SingularDensity, nu: f64, x: f64, t: f64) -> Complex64 {
    let beta = dens.beta();
    let delta = dens.delta;
    let mi = Complex64::new(0.0, -1.0);
    let chirp = |omega: Complex64| (Complex64::new(0.0, -t) * omega * omega).exp();
    let corner = Complex64::from_polar(beta, FRAC_PI_2 * delta) * mi;
    let near = integrate_panels(
        |w| {
            let omega = Complex64::new(1.0, -w.powf(beta));
            corner * chirp(omega) * reduced_j_complex(nu, omega, x)
        },
        0.0,
        (CUT_LEVEL / (2.0 * t)).powf(1.0 / beta),
        4,
        quad_opts(),
    );
    let far = integrate_panels(
        |v| {
            let omega = Complex64::new(2.0, -v);
            mi * Complex64::new(1.0, -v).powf(-delta) * chirp(omega) * reduced_j_complex(nu, omega, x)
        },
        0.0,
        CUT_LEVEL / (4.0 * t),
        4,
        quad_opts(),
    );
    near.value - far.value
}

/// (1−n)/2 − (1−δ).
pub fn phi_decay_exponent(delta: f64, n: usize) -> f64 {
    (1.0 - n as f64) / 2.0 - (1.0 - delta)
}

/// Envelope fit of |φ| over a spatial grid.
pub fn phi_decay_fit(delta: f64, n: usize, grid: &[f64]) -> Result<DecayFit> {
    let values = grid
        .iter()
        .map(|&x| singular_phi(delta, n, x).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;
    fit_envelope(Axis::Space, grid, &values)
}

/// Envelope fit of |ψ(x, ·)| over a time grid at fixed |x|.
pub fn psi_time_fit(delta: f64, n: usize, x_abs: f64, grid: &[f64]) -> Result<DecayFit> {
    let values = grid
        .iter()
        .map(|&t| singular_psi(delta, n, x_abs, t).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;
    fit_envelope(Axis::Time, grid, &values)
}

/// Spatial grid for the envelope fit: `per_block` points in each dyadic block
/// of [lo, hi], offset so that the samples do not lock onto the oscillation.
pub fn envelope_grid(lo: f64, hi: f64, per_block: usize) -> Vec<f64> {
    let blocks = (hi / lo).log2().floor() as usize;
    let mut out = Vec::with_capacity(blocks * per_block + 1);
    let m = (blocks * per_block) as f64;
    for i in 0..=blocks * per_block {
        out.push(lo * (hi / lo).powf(i as f64 / m));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierSample {
    pub xi: f64,
    pub numeric: f64,
    pub exact: f64,
    pub rel_err: f64,
}

/// Hankel transform of φ·e^{−r²/2R²} at the given frequencies, against the
/// exact |ξ|^{−n/2}(|ξ|−1)^{−δ}. The window smooths the exact transform on
/// the scale 1/R.
pub fn fourier_check(delta: f64, n: usize, xis: &[f64], window: f64) -> Result<Vec<FourierSample>> {
    let dens = SingularDensity::new(delta)?;
    let nu = order(n)?;
    if !(window > 0.0) {
        return Err(Error::OutOfRange(format!("window must be positive, got {window}")));
    }
    let (gx, gw) = gauss_legendre(16);
    let r_max = 8.0 * window;
    let panels = r_max.ceil() as usize;
    let h = r_max / panels as f64;
    let mut acc = vec![0.0; xis.len()];
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (&x, &w) in gx.iter().zip(&gw) {
            let r = mid + 0.5 * h * x;
            let phi = singular_phi(delta, n, r)?.re;
            let base = 0.5 * h * w * phi * (-r * r / (2.0 * window * window)).exp() * r.powf(n as f64 / 2.0);
            for (a, &xi) in acc.iter_mut().zip(xis) {
                *a += base * bessel_j_unchecked(nu, xi * r);
            }
        }
    }
    Ok(xis
        .iter()
        .zip(acc)
        .map(|(&xi, a)| {
            let numeric = a * xi.powf(-nu);
            let exact = dens.fourier(n, xi);
            FourierSample {
                xi,
                numeric,
                exact,
                rel_err: (numeric - exact).abs() / exact.abs(),
            }
        })
        .collect())
}

/// δ < (n+1)/2 − n/r.
pub fn lr_member_predicted(delta: f64, n: usize, r: f64) -> bool {
    delta < (n as f64 + 1.0) / 2.0 - n as f64 / r
}

/// ‖φ‖_{L^r} for each r, by fixed Gauss–Legendre panels on doubling blocks
/// out to 2^LR_BLOCKS with the block slope deciding divergence.
pub fn phi_lr_norms(delta: f64, n: usize, rs: &[f64]) -> Result<Vec<NormValue>> {
    SingularDensity::new(delta)?;
    order(n)?;
    if let Some(r) = rs.iter().find(|r| !(**r >= 1.0) || !r.is_finite()) {
        return Err(Error::OutOfRange(format!("r must lie in [1, inf), got {r}")));
    }
    let (gx, gw) = gauss_legendre(16);
    let mut blocks: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); rs.len()];
    let mut core = vec![0.0; rs.len()];
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for b in 0..=LR_BLOCKS {
        let panels = (hi - lo).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        let mut sums = vec![0.0; rs.len()];
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * h;
            for (&x, &w) in gx.iter().zip(&gw) {
                let rho = mid + 0.5 * h * x;
                let a = singular_phi(delta, n, rho)?.norm();
                let jac = 0.5 * h * w * rho.powi(n as i32 - 1);
                for (s, &r) in sums.iter_mut().zip(rs) {
                    *s += jac * a.powf(r);
                }
            }
        }
        for (i, s) in sums.into_iter().enumerate() {
            if b == 0 {
                core[i] = s;
            } else {
                blocks[i].push((lo, s, 0.0));
            }
        }
        lo = hi;
        hi *= 2.0;
    }
    let area = sphere_area(n);
    Ok(rs
        .iter()
        .zip(blocks.iter().zip(core))
        .map(|(&r, (bl, c))| {
            let sum: f64 = c + bl.iter().map(|b| b.1).sum::<f64>();
            match block_slope(bl, LR_SLOPE_WINDOW) {
                Some(s) if s >= DIVERGENCE_SLOPE => NormValue::Divergent,
                Some(s) => {
                    let ratio = 2f64.powf(s);
                    let tail = bl.last().map_or(0.0, |b| b.1) * ratio / (1.0 - ratio);
                    NormValue::Finite((area * (sum + tail)).powf(1.0 / r))
                }
                None => NormValue::Finite((area * sum).powf(1.0 / r)),
            }
        })
        .collect())
}

/// 2r/(2n − r(n−1))₊ for r > 2n/(n+1); a vanishing positive part means no
/// finite p satisfies the condition and is returned as `Exponent::Infinite`.
pub fn necessary_p_bound(r: Exponent, n: usize) -> Result<Exponent> {
    order(n)?;
    let nf = n as f64;
    let threshold = 2.0 * nf / (nf + 1.0);
    let rv = r.value();
    if rv <= threshold {
        return Err(Error::OutOfRange(format!(
            "no constraint from this example: r = {rv} <= 2n/(n+1) = {threshold}"
        )));
    }
    let denom = match r {
        Exponent::Infinite => return Ok(Exponent::Infinite),
        Exponent::Finite(rv) => (2.0 * nf - rv * (nf - 1.0)).max(0.0),
    };
    if denom == 0.0 {
        Ok(Exponent::Infinite)
    } else {
        Exponent::new(2.0 * rv / denom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpqConstraint {
    /// q > (2n−1)/(n−δ)
    SpatialDecay,
    /// q > 2n/(n+1−2δ)
    SpatialFront,
    /// p > 1/(1−δ)
    Temporal,
    /// p > 2q/(q(n−δ)+1−2n)
    MixedDecay,
    /// p > 2q/(q(n+1−2δ)−2n)
    MixedFront,
}

impl LpqConstraint {
    pub fn id(self) -> &'static str {
        match self {
            LpqConstraint::SpatialDecay => "spatial_decay",
            LpqConstraint::SpatialFront => "spatial_front",
            LpqConstraint::Temporal => "temporal",
            LpqConstraint::MixedDecay => "mixed_decay",
            LpqConstraint::MixedFront => "mixed_front",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpqVerdict {
    pub p: Exponent,
    pub q: Exponent,
    pub delta: f64,
    pub n: usize,
    pub member: bool,
    /// The violated constraint, or for members the one with the least slack.
    pub binding: LpqConstraint,
}

/// q thresholds in the order (SpatialDecay, SpatialFront).
pub fn q_thresholds(delta: f64, n: usize) -> [(LpqConstraint, f64); 2] {
    let nf = n as f64;
    [
        (LpqConstraint::SpatialDecay, (2.0 * nf - 1.0) / (nf - delta)),
        (LpqConstraint::SpatialFront, 2.0 * nf / (nf + 1.0 - 2.0 * delta)),
    ]
}

/// p thresholds at a q that passes [`q_thresholds`].
pub fn p_thresholds(delta: f64, n: usize, q: Exponent) -> [(LpqConstraint, f64); 3] {
    let nf = n as f64;
    let iq = q.recip();
    // 2q/(q a − b) = 2/(a − b/q)
    [
        (LpqConstraint::Temporal, 1.0 / (1.0 - delta)),
        (LpqConstraint::MixedDecay, 2.0 / (nf - delta - (2.0 * nf - 1.0) * iq)),
        (LpqConstraint::MixedFront, 2.0 / (nf + 1.0 - 2.0 * delta - 2.0 * nf * iq)),
    ]
}

fn argmax(list: &[(LpqConstraint, f64)]) -> (LpqConstraint, f64) {
    list.iter()
        .copied()
        .fold(list[0], |best, c| if c.1 > best.1 { c } else { best })
}

/// Membership of (p, q) in the L^p_t L^q_x region of ψ.
pub fn lpq_region(delta: f64, n: usize, p: Exponent, q: Exponent) -> Result<LpqVerdict> {
    SingularDensity::new(delta)?;
    order(n)?;
    let verdict = |member, binding| LpqVerdict {
        p,
        q,
        delta,
        n,
        member,
        binding,
    };
    let (qc, qt) = argmax(&q_thresholds(delta, n));
    if q.value() <= qt {
        return Ok(verdict(false, qc));
    }
    let (pc, pt) = argmax(&p_thresholds(delta, n, q));
    Ok(verdict(p.value() > pt, pc))
}

/// min{q/q*, p/p*(q)} with q*, p* the largest thresholds; above 1 exactly
/// for members.
pub fn region_slack(delta: f64, n: usize, p: Exponent, q: Exponent) -> f64 {
    let qt = argmax(&q_thresholds(delta, n)).1;
    let q_ratio = q.value() / qt;
    if q_ratio <= 1.0 {
        return q_ratio;
    }
    let pt = argmax(&p_thresholds(delta, n, q)).1;
    q_ratio.min(p.value() / pt)
}

/// Checks that the region at δ just below min{1, (n+1)/2 − n/r}, intersected
/// with the scaling line 2/p + n/q = n/r, excludes no pair whose p exceeds
/// [`necessary_p_bound`]. Returns the offending (p, q) pairs.
pub fn scaling_conflicts(n: usize, r: f64, samples: usize) -> Result<Vec<(f64, f64)>> {
    let nf = n as f64;
    let bound = necessary_p_bound(Exponent::new(r)?, n)?;
    let delta = ((nf + 1.0) / 2.0 - nf / r).min(1.0) - 1e-9;
    if delta <= 0.0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    // 1/q ranges over (0, 1/r); 1/p = n(1/r − 1/q)/2
    for i in 1..samples {
        let iq = i as f64 / samples as f64 / r;
        let ip = nf * (1.0 / r - iq) / 2.0;
        if ip > 1.0 {
            continue;
        }
        let p = Exponent::from_recip(ip);
        if p.value() <= bound.value() * (1.0 + 1e-6) {
            continue;
        }
        let q = Exponent::from_recip(iq);
        if !lpq_region(delta, n, p, q)?.member {
            out.push((p.value(), q.value()));
        }
    }
    Ok(out)
}

/// Truncated space-time norms of ψ on |x| ≤ 4T + SCAN_MARGIN, t ≤ T.
pub const SCAN_MARGIN: f64 = 20.0;
const SCAN_V_NODES: usize = 10;
const SCAN_XT_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpqCell {
    pub p: f64,
    pub q: f64,
    /// ‖ψ‖_{L^p(0,T; L^q(|x| ≤ 4T+margin))} per horizon T.
    pub norms: Vec<f64>,
    /// Log-log slope of the p-th power increments between horizons.
    pub increment_slope: f64,
    pub divergent: bool,
    pub verdict: LpqVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpqScan {
    pub delta: f64,
    pub n: usize,
    pub horizons: Vec<f64>,
    pub cells: Vec<LpqCell>,
}

/// Composite Gauss–Legendre nodes and weights on [a, b] with unit-ish panels
/// of width at most `width`.
fn composite(a: f64, b: f64, width: f64, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(nodes);
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * nodes);
    let mut ws = Vec::with_capacity(panels * nodes);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (&x, &w) in gx.iter().zip(&gw) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

/// Empirical L^p_t L^q_x scan. Horizons must be increasing; divergence is
/// flagged when the increments of the p-th power between successive horizons
/// do not decay (slope at or above [`DIVERGENCE_SLOPE`]).
pub fn lpq_scan(delta: f64, n: usize, ps: &[f64], qs: &[f64], horizons: &[f64]) -> Result<LpqScan> {
    let dens = SingularDensity::new(delta)?;
    let nu = order(n)?;
    if horizons.len() < 3 || horizons.windows(2).any(|w| !(w[1] > w[0])) || !(horizons[0] > 0.0) {
        return Err(Error::OutOfRange("lpq_scan needs >= 3 increasing positive horizons".into()));
    }
    if let Some(e) = ps.iter().chain(qs).find(|e| !(**e >= 1.0) || !e.is_finite()) {
        return Err(Error::OutOfRange(format!("scan exponents must lie in [1, inf), got {e}")));
    }
    let t_max = horizons[horizons.len() - 1];
    let x_of = |t: f64| 4.0 * t + SCAN_MARGIN;
    let x_max = x_of(t_max);

    let beta = dens.beta();
    let v_panels = ((4.0 * t_max + x_max) * beta / 2.0).ceil();
    let (vs, vw) = composite(0.0, 1.0, 1.0 / v_panels, SCAN_V_NODES);
    let omegas: Vec<f64> = vs.iter().map(|v| 1.0 + v.powf(beta)).collect();

    // breakpoints of the x and t grids must include every horizon
    let mut x_breaks = vec![0.0];
    let mut t_breaks = vec![0.0];
    for &h in horizons {
        x_breaks.push(x_of(h));
        t_breaks.push(h);
    }
    let mut xs = Vec::new();
    let mut xw = Vec::new();
    let mut x_ends = Vec::new();
    for w in x_breaks.windows(2) {
        let (a, b) = composite(w[0], w[1], 1.0, SCAN_XT_NODES);
        xs.extend(a);
        xw.extend(b);
        x_ends.push(xs.len());
    }
    let mut ts = Vec::new();
    let mut tw = Vec::new();
    let mut t_ends = Vec::new();
    for w in t_breaks.windows(2) {
        let (a, b) = composite(w[0], w[1], 0.5, SCAN_XT_NODES);
        ts.extend(a);
        tw.extend(b);
        t_ends.push(ts.len());
    }

    let kernel = nalgebra::DMatrix::from_fn(xs.len(), omegas.len(), |i, j| reduced_j(nu, omegas[j], xs[i]));
    let phase_re = nalgebra::DMatrix::from_fn(omegas.len(), ts.len(), |j, k| {
        beta * vw[j] * (ts[k] * omegas[j] * omegas[j]).cos()
    });
    let phase_im = nalgebra::DMatrix::from_fn(omegas.len(), ts.len(), |j, k| {
        -beta * vw[j] * (ts[k] * omegas[j] * omegas[j]).sin()
    });
    let re = &kernel * phase_re;
    let im = &kernel * phase_im;
    let modulus = re.zip_map(&im, |a, b| a.hypot(b));

    let area = sphere_area(n);
    let radial: Vec<f64> = xs.iter().zip(&xw).map(|(x, w)| area * w * x.powi(n as i32 - 1)).collect();
    let mut cells = Vec::with_capacity(ps.len() * qs.len());
    for &q in qs {
        // inner[h][k] = ∫_{|x| ≤ X_h} |ψ(x, t_k)|^q dx
        let mut inner = vec![vec![0.0; ts.len()]; horizons.len()];
        for k in 0..ts.len() {
            let col = modulus.column(k);
            let mut acc = 0.0;
            let mut start = 0;
            for (h, &end) in x_ends.iter().enumerate() {
                for i in start..end {
                    acc += radial[i] * col[i].powf(q);
                }
                inner[h][k] = acc;
                start = end;
            }
        }
        for &p in ps {
            let powers: Vec<f64> = (0..horizons.len())
                .map(|h| {
                    (0..t_ends[h])
                        .map(|k| tw[k] * inner[h][k].powf(p / q))
                        .sum::<f64>()
                })
                .collect();
            let increments: Vec<(f64, f64, f64)> = powers
                .windows(2)
                .zip(horizons)
                .map(|(w, &h)| (h, (w[1] - w[0]).max(0.0), 0.0))
                .collect();
            let slope = block_slope(&increments, increments.len()).unwrap_or(f64::NEG_INFINITY);
            cells.push(LpqCell {
                p,
                q,
                norms: powers.iter().map(|v| v.powf(1.0 / p)).collect(),
                increment_slope: slope,
                divergent: slope >= DIVERGENCE_SLOPE,
                verdict: lpq_region(delta, n, Exponent::Finite(p), Exponent::Finite(q))?,
            });
        }
    }
    Ok(LpqScan {
        delta,
        n,
        horizons: horizons.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::geometric_grid;

    fn phi0(n: usize, x: f64) -> f64 {
        // δ = 0: plain Gauss–Legendre on [1, 2]
        let nu = (n as f64 - 2.0) / 2.0;
        let (gx, gw) = gauss_legendre(40);
        let panels = 8;
        let mut s = 0.0;
        for p in 0..panels {
            let a = 1.0 + p as f64 / panels as f64;
            let h = 1.0 / panels as f64;
            for (&g, &w) in gx.iter().zip(&gw) {
                s += 0.5 * h * w * reduced_j(nu, a + 0.5 * h * (g + 1.0), x);
            }
        }
        s
    }

    #[test]
    fn density_range() {
        assert!(SingularDensity::new(0.0).is_err());
        assert!(SingularDensity::new(1.0).is_err());
        assert!(singular_phi(1.2, 3, 1.0).is_err());
        assert!(singular_psi(0.5, 3, 1.0, -1.0).is_err());
    }

    #[test]
    fn phi_at_origin_is_finite_and_continuous() {
        for n in [2, 3, 5] {
            let a = singular_phi(0.5, n, 0.0).unwrap().re;
            let b = singular_phi(0.5, n, 1e-6).unwrap().re;
            assert!(a.is_finite() && (a - b).abs() < 1e-9 * a.abs(), "{n}: {a} {b}");
        }
    }

    #[test]
    fn phi_closed_form_at_origin() {
        // n = 2: φ(0) = ∫_1^2 (ω−1)^{−δ} dω = 1/(1−δ)
        let v = singular_phi(0.3, 2, 0.0).unwrap().re;
        assert!((v - 1.0 / 0.7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn hankel_route_matches_real_line() {
        for n in [2, 3, 4] {
            for delta in [0.2, 0.5, 0.8] {
                let dens = SingularDensity::new(delta).unwrap();
                let nu = (n as f64 - 2.0) / 2.0;
                for x in [40.0, 97.3, 400.0, 2500.0] {
                    let a = phi_direct(dens, nu, x);
                    let b = phi_hankel(dens, nu, x);
                    let scale = x.powf(phi_decay_exponent(delta, n));
                    assert!((a - b).norm() < 1e-8 * scale, "n={n} d={delta} x={x}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn rotated_route_matches_real_line() {
        for n in [2, 3] {
            for delta in [0.3, 0.7] {
                let dens = SingularDensity::new(delta).unwrap();
                let nu = (n as f64 - 2.0) / 2.0;
                for (x, t) in [(0.05, 5.0), (1.0, 20.0), (2.0, 60.0)] {
                    let a = psi_direct(dens, nu, x, t);
                    let b = psi_rotated(dens, nu, x, t);
                    assert!((a - b).norm() < 1e-9 * a.norm().max(1e-3), "n={n} d={delta} x={x} t={t}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn psi_at_zero_time_is_phi() {
        for x in [0.0, 0.3, 50.0] {
            assert_eq!(singular_psi(0.4, 3, x, 0.0).unwrap(), singular_phi(0.4, 3, x).unwrap());
        }
    }

    #[test]
    fn small_delta_is_second_order_close_to_nonsingular() {
        // ∫ u^{−δ} f = ∫ f − δ ∫ ln(u) f + δ²/2 ∫ ln²(u) f + O(δ³)
        let n = 3;
        let nu = 0.5;
        let x = 1.7;
        let (gx, gw) = gauss_legendre(60);
        // u = e^{−s}
        let (mut m1, mut m2) = (0.0, 0.0);
        let panels = 20;
        let s_max = 40.0;
        for p in 0..panels {
            let a = s_max * p as f64 / panels as f64;
            let h = s_max / panels as f64;
            for (&g, &w) in gx.iter().zip(&gw) {
                let s = a + 0.5 * h * (g + 1.0);
                let u = (-s).exp();
                let f = 0.5 * h * w * reduced_j(nu, 1.0 + u, x) * u;
                m1 -= s * f;
                m2 += s * s * f;
            }
        }
        let base = phi0(n, x);
        for delta in [0.05, 0.01, 0.002] {
            let v = singular_phi(delta, n, x).unwrap().re;
            let model = base - delta * m1 + 0.5 * delta * delta * m2;
            assert!((v - model).abs() < 4.0 * delta.powi(3) * base.abs(), "{delta}: {v} {model}");
        }
        // at δ = 0.05 the shift is a genuine O(δ) effect, not a quadrature error
        let v = singular_phi(0.05, n, x).unwrap().re;
        assert!((v - base).abs() > 0.01 * base.abs());
        let v = singular_phi(0.005, n, x).unwrap().re;
        assert!((v - base).abs() < 0.01 * base.abs());
    }

    #[test]
    fn fourier_side_matches_density() {
        let xis = [1.2, 1.35, 1.5, 1.65, 1.8];
        for (n, delta) in [(2, 0.5), (3, 0.3)] {
            for s in fourier_check(delta, n, &xis, 200.0).unwrap() {
                assert!(s.rel_err < 1e-3, "n={n} d={delta}: {s:?}");
            }
        }
    }

    #[test]
    fn decay_exponent_example() {
        assert_eq!(phi_decay_exponent(0.5, 3), -1.5);
        let fit = phi_decay_fit(0.5, 3, &envelope_grid(1e2, 1e5, 24)).unwrap();
        assert!((fit.fitted_exponent + 1.5).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn time_growth_example() {
        let fit = psi_time_fit(0.7, 3, 0.05, &geometric_grid(1e2, 1e5, 31)).unwrap();
        assert!((fit.fitted_exponent + 0.3).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn p_bound_examples() {
        for n in 2..=6 {
            assert_eq!(necessary_p_bound(Exponent::Finite(2.0), n).unwrap(), Exponent::Finite(2.0));
            let near = necessary_p_bound(Exponent::Finite(2.0 + 1e-9), n).unwrap().value();
            assert!((near - 2.0).abs() < 1e-7);
        }
        assert_eq!(necessary_p_bound(Exponent::Finite(3.0), 3).unwrap(), Exponent::Infinite);
        let v = necessary_p_bound(Exponent::Finite(2.5), 2).unwrap().value();
        assert!((v - 10.0 / 3.0).abs() < 1e-14);
        assert!(necessary_p_bound(Exponent::Finite(4.0 / 3.0), 2).is_err());
        assert!(necessary_p_bound(Exponent::Finite(1.2), 3).is_err());
        assert_eq!(necessary_p_bound(Exponent::Infinite, 3).unwrap(), Exponent::Infinite);
    }

    #[test]
    fn region_examples() {
        let qs = q_thresholds(0.5, 3);
        assert_eq!(qs[0].1, 2.0);
        assert_eq!(qs[1].1, 2.0);
        let v = lpq_region(0.5, 3, Exponent::Finite(10.0), Exponent::Finite(2.0)).unwrap();
        assert!(!v.member);
        let v = lpq_region(0.5, 3, Exponent::Finite(2.0), Exponent::Finite(6.0)).unwrap();
        assert!(!v.member);
        assert_eq!(v.binding, LpqConstraint::Temporal);
        assert_eq!(v.binding.id(), "temporal");
        let v = lpq_region(0.5, 3, Exponent::Finite(2.5), Exponent::Infinite).unwrap();
        assert!(v.member);
    }

    #[test]
    fn region_is_consistent_with_scaling_bound() {
        for n in 2..=5 {
            for i in 0..40 {
                let r = 2.0 + 0.25 * i as f64;
                let bad = scaling_conflicts(n, r, 400).unwrap();
                assert!(bad.is_empty(), "n={n} r={r}: {bad:?}");
            }
        }
    }

    #[test]
    fn below_two_the_region_only_adds_q_below_two() {
        for n in 2..=5 {
            let nf = n as f64;
            let lo = 2.0 * nf / (nf + 1.0);
            for i in 1..10 {
                let r = lo + (2.0 - lo) * i as f64 / 10.0;
                let bad = scaling_conflicts(n, r, 400).unwrap();
                assert!(!bad.is_empty());
                assert!(bad.iter().all(|&(_, q)| q > r && q < 2.0), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn lr_membership_grid() {
        let rs = [1.5, 2.2, 3.0, 4.0, 6.0];
        for delta in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let norms = phi_lr_norms(delta, 2, &rs).unwrap();
            for (&r, v) in rs.iter().zip(&norms) {
                assert_eq!(v.is_finite(), lr_member_predicted(delta, 2, r), "d={delta} r={r}: {v:?}");
            }
        }
    }
}
