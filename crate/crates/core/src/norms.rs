//! Weighted norms ‖·‖_X = ‖·‖_{X1} + ‖·‖_{X2} and ‖·‖_{Y_m}, membership scans
//! over parametric families, and the Herglotz decomposition φ = η e^{iωr} + η̄ e^{-iωr}.
//!
//! Every integral is split over the geometric grid z ∈ {2^{k/p}} with
//! k/p ∈ [-20, 40]. The block sequence decides convergence: a fitted log-log
//! slope at or above [`DIVERGENCE_SLOPE`] over the last ten octaves is
//! divergence, otherwise the tail is closed geometrically.

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::propagator::{RadialProfile, Support};
use crate::quad::{block_slope, integrate_panels, QuadOptions, DIVERGENCE_SLOPE};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

const GRID_LO: i32 = -20;
const GRID_HI: i32 = 40;
/// Octaves used for slope fits at the far end of the grid.
const FIT_OCTAVES: usize = 10;
/// Log-log slope of a supremand above which it is treated as unbounded.
pub const SUP_SLOPE: f64 = 0.01;
/// Growth factor over the last probes that also certifies divergence.
pub const SUP_GROWTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormValue {
    Finite(f64),
    Divergent,
}

impl NormValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            NormValue::Finite(v) => Some(*v),
            NormValue::Divergent => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    pub fn plus(self, other: NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Finite(a), NormValue::Finite(b)) => NormValue::Finite(a + b),
            _ => NormValue::Divergent,
        }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{v:.16e}"),
            NormValue::Divergent => write!(f, "DIV"),
        }
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(v) => s.serialize_f64(*v),
            NormValue::Divergent => s.serialize_str("DIV"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupProbe {
    pub term: &'static str,
    pub z: f64,
    pub supremand: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub n: usize,
    pub x1: NormValue,
    pub x2: NormValue,
    pub ym: Vec<NormValue>,
    pub sup_probe_log: Vec<SupProbe>,
}

impl NormReport {
    pub fn x(&self) -> NormValue {
        self.x1.plus(self.x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    /// Grid points per octave for block integrals and supremum probes.
    pub probes_per_octave: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            probes_per_octave: 1,
        }
    }
}

/// Which norm a scan or CLI call refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    X,
    X1,
    X2,
    Y(usize),
}

impl std::str::FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" => Ok(NormKind::X),
            "X1" => Ok(NormKind::X1),
            "X2" => Ok(NormKind::X2),
            _ => s
                .strip_prefix('Y')
                .and_then(|m| m.parse().ok())
                .map(NormKind::Y)
                .ok_or_else(|| {
                    Error::Usage(format!("unknown norm '{s}', expected X, X1, X2 or Y<m>"))
                }),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::X => write!(f, "X"),
            NormKind::X1 => write!(f, "X1"),
            NormKind::X2 => write!(f, "X2"),
            NormKind::Y(m) => write!(f, "Y{m}"),
        }
    }
}

struct Grid {
    /// edges[0] = 0, then the geometric probes.
    edges: Vec<f64>,
    ratio: f64,
    window: usize,
}

impl Grid {
    fn new(opts: NormOptions) -> Self {
        let p = opts.probes_per_octave.max(1);
        let mut edges = vec![0.0];
        for k in (GRID_LO * p as i32)..=(GRID_HI * p as i32) {
            edges.push(2f64.powf(k as f64 / p as f64));
        }
        Grid {
            edges,
            ratio: 2f64.powf(1.0 / p as f64),
            window: FIT_OCTAVES * p,
        }
    }

    fn blocks(&self) -> usize {
        self.edges.len() - 1
    }
}

fn block_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_intervals: 2000,
    }
}

/// Profile data restricted to where it can be nonzero.
struct Domain {
    lo: f64,
    hi: f64,
}

fn domain_of(f: &RadialProfile) -> Result<Domain> {
    match f.support() {
        Support::Compact { lo, hi } => Ok(Domain { lo, hi }),
        Support::Tail { lo, .. } => {
            if f.tail_terms().is_empty() {
                return Err(Error::InadmissibleTail(
                    "unbounded support without a tail descriptor".into(),
                ));
            }
            Ok(Domain {
                lo,
                hi: f64::INFINITY,
            })
        }
    }
}

/// ∫ over [a, b] ∩ domain. The first block [0, b] uses r = b v² so that
/// r^{-1/2}-type endpoint behaviour is integrated accurately.
fn block_integral<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    dom: &Domain,
) -> (Complex64, f64) {
    let lo = a.max(dom.lo);
    let hi = b.min(dom.hi);
    if hi <= lo {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    if lo == 0.0 {
        let r = integrate_panels(
            |v| f(hi * v * v) * (2.0 * hi * v),
            0.0,
            1.0,
            4,
            block_opts(),
        );
        return (r.value, r.err);
    }
    let r = integrate_panels(f, lo, hi, 4, block_opts());
    (r.value, r.err)
}

/// Block integrals over the grid; block i spans [edges[i], edges[i+1]].
fn grid_blocks<F: Fn(f64) -> Complex64>(
    f: &F,
    grid: &Grid,
    dom: &Domain,
    skip_first: bool,
) -> Vec<Complex64> {
    (0..grid.blocks())
        .map(|i| {
            if skip_first && i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                block_integral(f, grid.edges[i], grid.edges[i + 1], dom).0
            }
        })
        .collect()
}

fn real_blocks<F: Fn(f64) -> f64>(f: &F, grid: &Grid, dom: &Domain, skip_first: bool) -> Vec<f64> {
    let g = |r: f64| Complex64::new(f(r), 0.0);
    grid_blocks(&g, grid, dom, skip_first)
        .into_iter()
        .map(|v| v.re.abs())
        .collect()
}

/// Geometric tail closing the block sequence, or None when it does not decay.
fn tail_beyond(blocks: &[f64], grid: &Grid) -> Option<f64> {
    let triples: Vec<(f64, f64, f64)> = blocks
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &b)| (grid.edges[i], b, 0.0))
        .collect();
    match block_slope(&triples, grid.window) {
        None => Some(0.0),
        Some(s) if s >= DIVERGENCE_SLOPE => None,
        Some(s) => {
            let q = grid.ratio.powf(s);
            Some(blocks.last().copied().unwrap_or(0.0) * q / (1.0 - q))
        }
    }
}

fn total(blocks: &[f64], grid: &Grid) -> NormValue {
    match tail_beyond(blocks, grid) {
        None => NormValue::Divergent,
        Some(t) => NormValue::Finite(blocks.iter().sum::<f64>() + t),
    }
}

/// Slope of ln S against ln z over the last `window` probes, with the growth
/// factor across that window.
fn sup_trend(probes: &[(f64, f64)], window: usize) -> Option<(f64, f64)> {
    let tail: Vec<(f64, f64)> = probes[probes.len().saturating_sub(window + 1)..]
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let growth = (tail[tail.len() - 1].1 - tail[0].1).exp();
    Some((sxy / sxx, growth))
}

fn unbounded(probes: &[(f64, f64)], window: usize) -> bool {
    match sup_trend(probes, window) {
        Some((slope, growth)) => slope > SUP_SLOPE || (growth >= SUP_GROWTH && slope > 0.0),
        None => false,
    }
}

/// Maximizes `s` on [a, b] by golden-section search.
fn golden_max<F: FnMut(f64) -> f64>(mut s: F, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = s(a).max(s(b));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = s(c);
    let mut fd = s(d);
    for _ in 0..80 {
        if (b - a) <= 1e-12 * b {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = s(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = s(d);
        }
    }
    best = best.max(fc).max(fd);
    best
}

fn argmax(probes: &[(f64, f64)]) -> usize {
    probes
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
            if p.1 > acc.1 {
                (i, p.1)
            } else {
                acc
            }
        })
        .0
}

/// sup_z z^a |∫_0^z F| for a complex integrand F. Probes are logged under `term`.
fn sup_cumulative<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    grid: &Grid,
    dom: &Domain,
    term: &'static str,
    log: &mut Vec<SupProbe>,
) -> NormValue {
    let blocks = grid_blocks(f, grid, dom, false);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut cumulative = Vec::with_capacity(blocks.len());
    for b in &blocks {
        acc += b;
        cumulative.push(acc);
    }
    // cumulative[i] = ∫_0^{edges[i+1]}
    let probes: Vec<(f64, f64)> = (0..blocks.len())
        .map(|i| {
            (
                grid.edges[i + 1],
                grid.edges[i + 1].powf(a) * cumulative[i].norm(),
            )
        })
        .collect();
    log.extend(probes.iter().map(|&(z, s)| SupProbe {
        term,
        z,
        supremand: s,
    }));
    if unbounded(&probes, grid.window) {
        return NormValue::Divergent;
    }
    let i = argmax(&probes);
    let left = if i == 0 { 0.0 } else { grid.edges[i] };
    let right = grid.edges[(i + 2).min(grid.edges.len() - 1)];
    let base = if i == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        cumulative[i - 1]
    };
    let refined = golden_max(
        |z| {
            if z <= 0.0 {
                return 0.0;
            }
            let c = base + block_integral(f, left, z, dom).0;
            z.powf(a) * c.norm()
        },
        left.max(grid.edges[1] * 1e-3),
        right,
    );
    NormValue::Finite(refined.max(probes[i].1))
}

/// sup_z z ∫_z^∞ F for nonnegative F.
fn sup_tail<F: Fn(f64) -> f64>(
    f: &F,
    grid: &Grid,
    dom: &Domain,
    term: &'static str,
    log: &mut Vec<SupProbe>,
) -> NormValue {
    let blocks = real_blocks(f, grid, dom, true);
    let Some(beyond) = tail_beyond(&blocks, grid) else {
        return NormValue::Divergent;
    };
    // tails[i] = ∫_{edges[i]}^∞ for i ≥ 1
    let mut tails = vec![0.0; grid.edges.len()];
    let mut acc = beyond;
    tails[grid.edges.len() - 1] = acc;
    for i in (1..blocks.len()).rev() {
        acc += blocks[i];
        tails[i] = acc;
    }
    let probes: Vec<(f64, f64)> = (1..grid.edges.len())
        .map(|i| (grid.edges[i], grid.edges[i] * tails[i]))
        .collect();
    log.extend(probes.iter().map(|&(z, s)| SupProbe {
        term,
        z,
        supremand: s,
    }));
    if unbounded(&probes, grid.window) {
        return NormValue::Divergent;
    }
    let j = argmax(&probes) + 1;
    let left = grid.edges[j - 1].max(grid.edges[1]);
    let right_idx = (j + 1).min(grid.edges.len() - 1);
    let right = grid.edges[right_idx];
    let g = |r: f64| Complex64::new(f(r), 0.0);
    let refined = golden_max(
        |z| z * (tails[right_idx] + block_integral(&g, z, right, dom).0.re),
        left,
        right,
    );
    NormValue::Finite(refined.max(probes[j - 1].1))
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if n > MAX_ORDER {
        return Err(Error::OutOfRange(format!(
            "norms need n <= {MAX_ORDER} derivatives, got n={n}"
        )));
    }
    Ok(())
}

/// |v| with values at the rounding level of the summands' magnitude set to 0.
fn cancelled(v: Complex64, magnitude: f64) -> f64 {
    let a = v.norm();
    if a <= 64.0 * f64::EPSILON * magnitude {
        0.0
    } else {
        a
    }
}

/// Derivatives φ_ω^{(k)}(r), k ≤ MAX_ORDER.
fn derivatives(f: &RadialProfile, r: f64) -> Jet {
    f.envelope_jet(Jet::variable(r, 1.0))
}

fn deriv_abs(f: &RadialProfile, r: f64, k: usize) -> f64 {
    derivatives(f, r).derivative(k).norm()
}

/// (‖f‖_{X1}, ‖f‖_{X2}) with the default grid.
pub fn norm_x(f: &RadialProfile, n: usize) -> Result<(NormValue, NormValue)> {
    let mut log = Vec::new();
    norm_x_with(f, n, NormOptions::default(), &mut log)
}

pub fn norm_x_with(
    f: &RadialProfile,
    n: usize,
    opts: NormOptions,
    log: &mut Vec<SupProbe>,
) -> Result<(NormValue, NormValue)> {
    check_dimension(n)?;
    let dom = domain_of(f)?;
    let grid = Grid::new(opts);
    let nf = n as f64;
    let h = (nf - 1.0) / 2.0;

    let x1_integrand = |r: f64| {
        let j = derivatives(f, r);
        Complex64::new(
            j.c[0].norm() * r.powf(nf - 2.0) + j.c[1].norm() * r.powf(nf - 1.0),
            0.0,
        )
    };
    let x1 = sup_cumulative(&x1_integrand, (1.0 - nf) / 2.0, &grid, &dom, "X1", log);

    let weighted_derivative = |r: f64| {
        let j = derivatives(f, r);
        let (a, b) = (j.c[1] * r.powf(h), j.c[0] * (h * r.powf(h - 1.0)));
        cancelled(a + b, a.norm() + b.norm())
    };
    let first = total(
        &real_blocks(&weighted_derivative, &grid, &dom, false),
        &grid,
    );
    let tail_integrand = |r: f64| f.envelope(r).norm() * r.powf((nf - 5.0) / 2.0);
    let second = sup_tail(&tail_integrand, &grid, &dom, "X2", log);
    Ok((x1, first.plus(second)))
}

/// ‖f‖_{Y_m} for 0 ≤ m ≤ n with the default grid.
pub fn norm_ym(f: &RadialProfile, n: usize, m: usize) -> Result<NormValue> {
    let mut log = Vec::new();
    norm_ym_with(f, n, m, NormOptions::default(), &mut log)
}

pub fn norm_ym_with(
    f: &RadialProfile,
    n: usize,
    m: usize,
    opts: NormOptions,
    log: &mut Vec<SupProbe>,
) -> Result<NormValue> {
    check_dimension(n)?;
    if m > n {
        return Err(Error::OutOfRange(format!(
            "Y_m needs m <= n, got m={m}, n={n}"
        )));
    }
    let dom = domain_of(f)?;
    let grid = Grid::new(opts);
    let mut sum = NormValue::Finite(0.0);
    if m < n {
        for k in 0..=m {
            let w = (n - m + k - 1) as i32;
            let integrand = |r: f64| deriv_abs(f, r, k) * r.powi(w);
            sum = sum.plus(total(&real_blocks(&integrand, &grid, &dom, false), &grid));
            if !sum.is_finite() {
                return Ok(NormValue::Divergent);
            }
        }
        return Ok(sum);
    }
    for k in 1..=n {
        let integrand = |r: f64| deriv_abs(f, r, k) * r.powi(k as i32 - 1);
        sum = sum.plus(total(&real_blocks(&integrand, &grid, &dom, false), &grid));
        if !sum.is_finite() {
            return Ok(NormValue::Divergent);
        }
    }
    let moment = |r: f64| f.envelope(r) * r;
    let sup = sup_cumulative(&moment, -2.0, &grid, &dom, "Yn", log);
    Ok(sum
        .plus(sup)
        .plus(NormValue::Finite(f.envelope(0.0).norm())))
}

/// X1, X2 and Y_0..Y_n together, with the supremum probe log.
pub fn norm_report(f: &RadialProfile, n: usize) -> Result<NormReport> {
    norm_report_with(f, n, NormOptions::default())
}

pub fn norm_report_with(f: &RadialProfile, n: usize, opts: NormOptions) -> Result<NormReport> {
    let mut log = Vec::new();
    let (x1, x2) = norm_x_with(f, n, opts, &mut log)?;
    let ym = (0..=n)
        .map(|m| norm_ym_with(f, n, m, opts, &mut log))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport {
        n,
        x1,
        x2,
        ym,
        sup_probe_log: log,
    })
}

/// One norm selected by `kind`.
pub fn evaluate(f: &RadialProfile, n: usize, kind: NormKind) -> Result<NormValue> {
    match kind {
        NormKind::X => norm_x(f, n).map(|(a, b)| a.plus(b)),
        NormKind::X1 => norm_x(f, n).map(|(a, _)| a),
        NormKind::X2 => norm_x(f, n).map(|(_, b)| b),
        NormKind::Y(m) => norm_ym(f, n, m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Power,
    OscillatingPower,
    Bump,
    HerglotzEnvelope,
}

/// A one-parameter family. The scanned parameter is α for the power families,
/// the right support end for `Bump` and the frequency for `HerglotzEnvelope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub tag: FamilyTag,
    /// Carrier frequency attached to the envelope.
    pub omega: f64,
    /// Left support end for `Bump`.
    pub lo: f64,
    /// Truncation K for `HerglotzEnvelope`.
    pub truncation: usize,
}

impl FamilySpec {
    pub fn new(tag: FamilyTag) -> Self {
        FamilySpec {
            tag,
            omega: 0.0,
            lo: 1.0,
            truncation: 6,
        }
    }

    pub fn profile(&self, param: f64, n: usize) -> Result<RadialProfile> {
        let p = match self.tag {
            FamilyTag::Power => RadialProfile::power(param)?,
            FamilyTag::OscillatingPower => RadialProfile::osc_power(param)?,
            FamilyTag::Bump => RadialProfile::bump(self.lo, param)?,
            FamilyTag::HerglotzEnvelope => {
                return RadialProfile::herglotz_envelope(n, param, self.truncation, false);
            }
        };
        Ok(p.with_carrier(self.omega))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub param: f64,
    pub value: NormValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipScan {
    pub kind: String,
    pub points: Vec<ScanPoint>,
    /// First grid parameter after the last divergent one, when both verdicts occur.
    pub threshold: Option<f64>,
}

/// Finite/divergent verdict of `kind` along `params` (evaluated in parallel).
pub fn membership_scan(
    spec: &FamilySpec,
    n: usize,
    kind: NormKind,
    params: &[f64],
) -> Result<MembershipScan> {
    let points = params
        .par_iter()
        .map(|&p| {
            Ok(ScanPoint {
                param: p,
                value: evaluate(&spec.profile(p, n)?, n, kind)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last_div = points.iter().rposition(|p| !p.value.is_finite());
    let threshold = match last_div {
        Some(i) if i + 1 < points.len() => Some(points[i + 1].param),
        _ => None,
    };
    Ok(MembershipScan {
        kind: kind.to_string(),
        points,
        threshold,
    })
}

/// (η_ω with carrier +|ω|, η̄_ω with carrier −|ω|) whose data add up to the
/// Herglotz datum r^{(2-n)/2} J_{(n-2)/2}(|ω| r) up to the truncation K.
pub fn herglotz_decompose(
    omega: f64,
    n: usize,
    k: usize,
) -> Result<(RadialProfile, RadialProfile)> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok((
        RadialProfile::herglotz_envelope(n, omega, k, false)?,
        RadialProfile::herglotz_envelope(n, omega, k, true)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_real;
    use crate::special::bessel::bessel_j_unchecked;

    fn fin(v: NormValue) -> f64 {
        v.value().expect("expected a finite norm")
    }

    #[test]
    fn power_family_x_boundary() {
        let (a, b) = norm_x(&RadialProfile::power(1.0).unwrap(), 3).unwrap();
        assert!(a.is_finite() && b.is_finite());
        let (a, b) = norm_x(&RadialProfile::power(0.9).unwrap(), 3).unwrap();
        assert!(!a.plus(b).is_finite());
    }

    #[test]
    fn bump_y0_matches_direct_quadrature() {
        let f = RadialProfile::bump(1.0, 2.0).unwrap();
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 10_000,
        };
        let (direct, _) = integrate_real(|r| f.envelope(r).norm() * r * r, 1.0, 2.0, opts);
        let y0 = fin(norm_ym(&f, 3, 0).unwrap());
        assert!((y0 - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn bump_x_matches_dense_evaluation() {
        // brute force: X1 supremum over a fine z-grid, X2 from cumulative sums
        let f = RadialProfile::bump(1.0, 2.0).unwrap();
        let n = 2;
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 10_000,
        };
        let integrand = |r: f64| {
            f.envelope(r).norm() * r.powi(n as i32 - 2)
                + f.envelope_derivative(r, 1).norm() * r.powi(n as i32 - 1)
        };
        let mut best: f64 = 0.0;
        let mut c = 0.0;
        let step = 1e-5;
        for i in 0..100_000 {
            let z = 1.0 + i as f64 * step;
            c += integrate_real(integrand, z, z + step, opts).0;
            best = best.max((z + step).powf((1.0 - n as f64) / 2.0) * c);
        }
        let (x1, x2) = norm_x(&f, n).unwrap();
        assert!(
            (fin(x1) - best).abs() < 1e-8 * best,
            "{} vs {best}",
            fin(x1)
        );
        let h = 0.5;
        let (d, _) = integrate_real(
            |r| {
                (f.envelope_derivative(r, 1) * r.powf(h) + f.envelope(r) * (h * r.powf(h - 1.0)))
                    .norm()
            },
            1.0,
            2.0,
            opts,
        );
        let mut sup: f64 = 0.0;
        let mut t = 0.0;
        for i in 0..100_000 {
            let z = 2.0 - i as f64 * step;
            t += integrate_real(|r| f.envelope(r).norm() * r.powf(-1.5), z - step, z, opts).0;
            sup = sup.max((z - step) * t);
        }
        assert!(
            (fin(x2) - d - sup).abs() < 1e-8 * (d + sup),
            "{} vs {} + {sup}",
            fin(x2),
            d
        );
    }

    #[test]
    fn ym_power_and_oscillating() {
        assert!(norm_ym(&RadialProfile::power(1.2).unwrap(), 2, 1)
            .unwrap()
            .is_finite());
        assert!(!norm_ym(&RadialProfile::osc_power(2.0).unwrap(), 2, 2)
            .unwrap()
            .is_finite());
        assert!(norm_ym(&RadialProfile::osc_power(2.1).unwrap(), 2, 2)
            .unwrap()
            .is_finite());
        assert!(norm_ym(&RadialProfile::bump(1.0, 2.0).unwrap(), 2, 5).is_err());
    }

    #[test]
    fn yn_includes_origin_value_and_moment() {
        // Gaussian e^{-r²}: moment sup is f(0)/2 attained as z → 0
        let f = RadialProfile::gaussian(1.0).unwrap();
        let yn = fin(norm_ym(&f, 2, 2).unwrap());
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-13,
            max_intervals: 10_000,
        };
        let (d1, _) = integrate_real(|r| f.envelope_derivative(r, 1).norm(), 0.0, 10.0, opts);
        let (d2, _) = integrate_real(|r| f.envelope_derivative(r, 2).norm() * r, 0.0, 10.0, opts);
        let expected = d1 + d2 + 0.5 + 1.0;
        assert!((yn - expected).abs() < 1e-8, "{yn} vs {expected}");
    }

    #[test]
    fn scan_brackets_power_threshold() {
        let params: Vec<f64> = (0..9).map(|i| 1.8 + 0.05 * i as f64).collect();
        let scan = membership_scan(
            &FamilySpec::new(FamilyTag::Power),
            4,
            NormKind::Y(2),
            &params,
        )
        .unwrap();
        let t = scan.threshold.unwrap();
        assert!((t - 2.0).abs() <= 0.05 + 1e-12, "threshold {t}");
    }

    #[test]
    fn herglotz_pair_reconstructs_even_dimension() {
        let (eta, bar) = herglotz_decompose(1.0, 2, 6).unwrap();
        for &r in &[30.0, 50.0] {
            let exact = bessel_j_unchecked(0.0, r);
            let rec = eta.datum(r) + bar.datum(r);
            assert!(
                (rec.re - exact).abs() < 1e-6 && rec.im.abs() < 1e-12,
                "r={r}"
            );
        }
        for &r in &[0.1, 0.3, 0.49] {
            let rec = eta.datum(r) + bar.datum(r);
            assert!((rec.re - bessel_j_unchecked(0.0, r)).abs() < 1e-14);
        }
        let (x1, x2) = norm_x(&eta, 2).unwrap();
        assert!(x1.is_finite() && x2.is_finite());
        assert!(norm_ym(&eta, 2, 2).unwrap().is_finite());
        assert!(herglotz_decompose(0.0, 2, 6).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("Y3".parse::<NormKind>().unwrap(), NormKind::Y(3));
        assert_eq!("X".parse::<NormKind>().unwrap(), NormKind::X);
        assert!("Z".parse::<NormKind>().is_err());
    }
}
