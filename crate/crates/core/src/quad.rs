//! Adaptive Gauss–Kronrod (10/21) quadrature for complex integrands, plus a
//! fixed Gauss–Legendre rule.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525452778,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Multiple of ε·∫|f| below which panel errors count as roundoff.
const ROUNDOFF_ULPS: f64 = 50.0;

/// Bisections that failed to shrink the error before refinement is abandoned.
const MAX_STALLS: usize = 20;

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Result of a quadrature: value plus an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
    pub evals: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
            evals: 0,
        }
    }

    pub fn add(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            err: self.err + other.err,
            evals: self.evals + other.evals,
        }
    }

    pub fn scale(self, s: Complex64) -> QuadResult {
        QuadResult {
            value: self.value * s,
            err: self.err * s.norm(),
            evals: self.evals,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// One 21-point Kronrod panel on [a, b].
pub fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let (value, err, _) = gk21_abs(f, a, b);
    (value, err)
}

/// Kronrod panel that also returns the Kronrod estimate of ∫|f|.
fn gk21_abs<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut abs = fc.norm() * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = h * XGK[i];
        let (lo, hi) = (f(c - dx), f(c + dx));
        let s = lo + hi;
        kron += s * WGK[i];
        abs += (lo.norm() + hi.norm()) * WGK[i];
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).norm();
    (value, err, abs * h.abs())
}

/// Adaptive integration of `f` over [a, b], starting from `init_panels`
/// equal subintervals.
pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    init_panels: usize,
    opts: QuadOptions,
) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    let n0 = init_panels.max(1);
    let mut heap = BinaryHeap::with_capacity(n0 * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evals = 0;
    // ∫|f|; errors below a few ulps of it are roundoff, not truncation
    let mut mass = 0.0;
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let pa = a + width * i as f64;
        let pb = if i + 1 == n0 {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let (v, e, m) = gk21_abs(&mut f, pa, pb);
        evals += 21;
        mass += m;
        total += v;
        total_err += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            err: e,
        });
    }
    let mut count = n0;
    let mut stalls = 0;
    let target = |total: Complex64, mass: f64| {
        opts.abs_tol
            .max(opts.rel_tol * total.norm())
            .max(ROUNDOFF_ULPS * f64::EPSILON * mass)
    };
    while total_err > target(total, mass) && count < opts.max_intervals {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1, _) = gk21_abs(&mut f, worst.a, mid);
        let (v2, e2, _) = gk21_abs(&mut f, mid, worst.b);
        evals += 42;
        let settled = (v1 + v2 - worst.value).norm() <= 1e-5 * (v1 + v2).norm();
        if settled && e1 + e2 >= 0.99 * worst.err {
            stalls += 1;
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        count += 1;
        if stalls >= MAX_STALLS {
            break;
        }
    }
    // re-sum to shed accumulated cancellation in the running totals
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in heap.iter() {
        value += p.value;
        err += p.err;
    }
    QuadResult { value, err, evals }
}

pub fn integrate<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_panels(f, a, b, 1, opts)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> (f64, f64) {
    let r = integrate_panels(|x| Complex64::new(f(x), 0.0), a, b, 1, opts);
    (r.value.re, r.err)
}

/// Integral over [a, ∞) of a function decaying at least like x^{-1-ε}, via
/// the map x = a + (1 - u) / u · scale.
pub fn integrate_to_infinity<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_panels(
        |u: f64| {
            if u <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = a + scale * (1.0 - u) / u;
            let v = f(x);
            if v.re.is_finite() && v.im.is_finite() {
                v * (scale / (u * u))
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        8,
        opts,
    )
}

/// Outcome of an integral over a half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailIntegral {
    Finite { value: f64, err: f64 },
    Divergent,
}

impl TailIntegral {
    pub fn value(&self) -> Option<f64> {
        match self {
            TailIntegral::Finite { value, .. } => Some(*value),
            TailIntegral::Divergent => None,
        }
    }
}

/// Number of doubling blocks used by [`integrate_doubling`].
pub const DOUBLING_BLOCKS: usize = 60;

/// Block integrals of a nonnegative `f` over [a·2^j, a·2^{j+1}], j < blocks.
pub fn doubling_blocks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    blocks: usize,
) -> Vec<(f64, f64, f64)> {
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_intervals: 400,
    };
    let mut out = Vec::with_capacity(blocks);
    let mut lo = a;
    for _ in 0..blocks {
        let hi = 2.0 * lo;
        let r = integrate_panels(|x| Complex64::new(f(x), 0.0), lo, hi, 4, opts);
        out.push((lo, r.value.re.abs(), r.err));
        lo = hi;
    }
    out
}

/// Log-log slope of the block integrals against the block start, fitted over
/// the last `window` blocks. `None` if those blocks are all zero.
pub fn block_slope(blocks: &[(f64, f64, f64)], window: usize) -> Option<f64> {
    let tail: Vec<(f64, f64)> = blocks[blocks.len().saturating_sub(window)..]
        .iter()
        .filter(|b| b.1 > 0.0)
        .map(|b| (b.0.ln(), b.1.ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Slope at or above which block integrals are treated as non-decaying.
pub const DIVERGENCE_SLOPE: f64 = -0.01;

/// ∫_a^∞ f for nonnegative `f` with power-law behaviour at infinity: doubling
/// blocks out to a·2^60, then a geometric extrapolation of the block sequence.
pub fn integrate_doubling<F: FnMut(f64) -> f64>(f: F, a: f64) -> TailIntegral {
    let blocks = doubling_blocks(f, a, DOUBLING_BLOCKS);
    let sum: f64 = blocks.iter().map(|b| b.1).sum();
    let err: f64 = blocks.iter().map(|b| b.2).sum();
    match block_slope(&blocks, 10) {
        None => TailIntegral::Finite { value: sum, err },
        Some(s) if s >= DIVERGENCE_SLOPE => TailIntegral::Divergent,
        Some(s) => {
            let ratio = 2f64.powf(s);
            let last = blocks.last().map_or(0.0, |b| b.1);
            let tail = last * ratio / (1.0 - ratio);
            TailIntegral::Finite {
                value: sum + tail,
                err: err + 1e-3 * tail,
            }
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Generalised Gauss–Laguerre rule for ∫_0^∞ y^α e^{−y} g(y) dy, α > −1,
/// by the eigen-decomposition of the Jacobi matrix.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let jacobi = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * i as f64 + alpha + 1.0
        } else if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            (k * (k + alpha)).sqrt()
        } else {
            0.0
        }
    });
    let eig = nalgebra::SymmetricEigen::new(jacobi);
    let mass = libm::tgamma(alpha + 1.0);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mass * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_rule_integrates_moments() {
        // ∫ y^{α+k} e^{−y} = Γ(α+k+1)
        for alpha in [0.0, -0.5, -0.9, 0.3] {
            let (x, w) = gauss_laguerre(20, alpha);
            for k in 0..10 {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                let exact = libm::tgamma(alpha + k as f64 + 1.0);
                assert!((s - exact).abs() < 1e-10 * exact, "{alpha} {k}: {s} {exact}");
            }
        }
    }

    #[test]
    fn kronrod_weights_sum_to_interval_length() {
        let s: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((s - 2.0).abs() < 1e-14);
        let g: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn single_panel_is_exact_for_degree_31() {
        let mut f = |x: f64| Complex64::new(x.powi(30) + x.powi(31), 0.0);
        let (v, _) = gk21(&mut f, -1.0, 1.0);
        assert!((v.re - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let r = integrate_panels(
            |x: f64| Complex64::new(0.0, 50.0 * x).exp(),
            0.0,
            3.0,
            4,
            QuadOptions::default(),
        );
        let exact = (Complex64::new(0.0, 150.0).exp() - 1.0) / Complex64::new(0.0, 50.0);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn semi_infinite_power_law() {
        let r = integrate_to_infinity(
            |x| Complex64::new((1.0 + x).powf(-2.5), 0.0),
            0.0,
            1.0,
            QuadOptions::default(),
        );
        assert!((r.value.re - 1.0 / 1.5).abs() < 1e-11);
    }

    #[test]
    fn doubling_tail_closes_power_laws() {
        let v = integrate_doubling(|x| (1.0 + x).powf(-1.5), 1.0)
            .value()
            .unwrap();
        assert!((v - 2.0 / 2f64.sqrt()).abs() < 1e-6);
        let slow = integrate_doubling(|x| (1.0 + x).powf(-1.05), 1.0)
            .value()
            .unwrap();
        assert!((slow - 2f64.powf(-0.05) / 0.05).abs() < 1e-3 * slow);
        assert_eq!(
            integrate_doubling(|x| 1.0 / (1.0 + x), 1.0),
            TailIntegral::Divergent
        );
        assert_eq!(
            integrate_doubling(|x| (1.0 + x).powf(-0.95), 1.0),
            TailIntegral::Divergent
        );
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(22)).sum();
        assert!((s - 2.0 / 23.0).abs() < 1e-14);
    }
}
