//! Self-similar blow-up of the chirped datum φ(ρ) = e^{-iρ²/4} 1_{ρ≥1} ρ^{-σ},
//! its annulus L^q growth rates, and the Strichartz exponent gate.

use crate::decay::{geometric_grid, log_log_regression, Axis, DecayFit};
use crate::error::{Error, Result};
use crate::norms::NormValue;
use crate::propagator::integral::chirped_hankel;
use crate::propagator::{default_quad, evolve_radial, ComplexAmplitude, EvalPoint, RadialProfile};
use crate::quad::{gauss_legendre, integrate_doubling, TailIntegral};
use rayon::prelude::*;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Fraction of max V defining the annulus window.
pub const WINDOW_LEVEL: f64 = 0.5;
/// Gauss–Legendre nodes for annulus integrals.
pub const ANNULUS_NODES: usize = 48;
/// Below this max V the limit profile counts as numerically zero.
const ZERO_PROFILE: f64 = 1e-12;

/// Surface area of the unit sphere in ℝ^n.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpDatum {
    pub n: usize,
    pub sigma: f64,
}

impl ChirpDatum {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let nf = n as f64;
        if !((nf - 3.0) / 2.0 < sigma && sigma < nf) {
            return Err(Error::OutOfRange(format!(
                "chirp exponent needs ({}-3)/2 < sigma < {n}, got {sigma}",
                n
            )));
        }
        Ok(ChirpDatum { n, sigma })
    }

    pub fn profile(&self) -> RadialProfile {
        RadialProfile::chirp(self.sigma).expect("validated exponent")
    }

    /// n/(n-σ): the annulus L^q norm blows up exactly for q above it.
    pub fn blowup_threshold(&self) -> f64 {
        let nf = self.n as f64;
        nf / (nf - self.sigma)
    }

    /// (n + (σ-n)q)/(2q), the exponent of the annulus L^q norm in k_t².
    pub fn predicted_exponent(&self, q: f64) -> f64 {
        let nf = self.n as f64;
        (nf + (self.sigma - nf) * q) / (2.0 * q)
    }

    /// ‖φ‖_{L^r(ℝ^n)} by radial quadrature over doubling blocks.
    pub fn lr_norm(&self, r: Exponent) -> NormValue {
        match r {
            // sup_{ρ≥1} ρ^{-σ}
            Exponent::Infinite => {
                if self.sigma >= 0.0 {
                    NormValue::Finite(1.0)
                } else {
                    NormValue::Divergent
                }
            }
            Exponent::Finite(r) => {
                let e = self.n as f64 - 1.0 - self.sigma * r;
                match integrate_doubling(|rho| rho.powf(e), 1.0) {
                    TailIntegral::Finite { value, .. } => {
                        NormValue::Finite((sphere_area(self.n) * value).powf(1.0 / r))
                    }
                    TailIntegral::Divergent => NormValue::Divergent,
                }
            }
        }
    }
}

/// k_t = √(1/(4t) - 1/4) for 0 < t < 1.
pub fn k_t(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange(format!(
            "self-similar frame needs 0 < t < 1, got {t}"
        )));
    }
    Ok((0.25 / t - 0.25).sqrt())
}

/// Times t_lo < … < t_hi < 1 with 1 - t geometric.
pub fn t_grid_to_one(t_lo: f64, t_hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(0.0 < t_lo && t_lo < t_hi && t_hi < 1.0) || points < 2 {
        return Err(Error::OutOfRange(format!(
            "time grid needs 0 < t_lo < t_hi < 1 and >= 2 points, got {t_lo}:{t_hi} with {points}"
        )));
    }
    Ok(geometric_grid(1.0 - t_lo, 1.0 - t_hi, points)
        .into_iter()
        .map(|s| 1.0 - s)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfSimilarFrame {
    pub t: f64,
    pub k_t: f64,
    pub z: Vec<f64>,
}

impl SelfSimilarFrame {
    pub fn new(t: f64, z: Vec<f64>) -> Result<Self> {
        Ok(SelfSimilarFrame { t, k_t: k_t(t)?, z })
    }

    /// |x| = 2 t k_t z.
    pub fn x_abs(&self, z: f64) -> f64 {
        2.0 * self.t * self.k_t * z
    }
}

/// ψ(x, t) for the chirped datum. t = 1 is the focusing time and is rejected.
pub fn chirp_solution(datum: &ChirpDatum, t: f64, x_abs: f64) -> Result<ComplexAmplitude> {
    if !(t > 0.0 && t.is_finite()) || t == 1.0 {
        return Err(Error::OutOfRange(format!(
            "chirp solution needs t > 0, t != 1, got {t}"
        )));
    }
    evolve_radial(&datum.profile(), EvalPoint::new(datum.n, x_abs, t)?)
}

/// 2|ψ(2 t k_t z, t)| k_t^{n-σ} on the frame's z grid.
pub fn rescaled_modulus(datum: &ChirpDatum, frame: &SelfSimilarFrame) -> Result<Vec<f64>> {
    let scale = 2.0 * frame.k_t.powf(datum.n as f64 - datum.sigma);
    frame
        .z
        .par_iter()
        .map(|&z| Ok(scale * chirp_solution(datum, frame.t, frame.x_abs(z))?.abs()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitProfile {
    pub n: usize,
    pub sigma: f64,
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub err: Vec<f64>,
}

impl LimitProfile {
    pub fn max(&self) -> f64 {
        self.v.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// Widest run of consecutive grid points with V ≥ level · max V, as (R₁, R₂).
    pub fn window(&self, level: f64) -> (f64, f64) {
        let cut = level * self.max();
        let mut best = (self.z[0], self.z[0]);
        let mut run: Option<f64> = None;
        for (&z, &v) in self.z.iter().zip(&self.v) {
            if v >= cut {
                let lo = *run.get_or_insert(z);
                if z - lo > best.1 - best.0 {
                    best = (lo, z);
                }
            } else {
                run = None;
            }
        }
        best
    }
}

/// V(z) = (2z)^{(2-n)/2} |∫_0^∞ J_{(n-2)/2}(sz) s^{n/2-σ} e^{is²} ds|.
fn limit_values(datum: &ChirpDatum, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let pure = RadialProfile::pure_power(datum.sigma)?;
    let n = datum.n;
    let rows: Vec<(f64, f64)> = z
        .par_iter()
        .map(|&z| {
            let i = chirped_hankel(&pure, n, z, 1.0, default_quad())?;
            let pref = (2.0 * z).powf((2.0 - n as f64) / 2.0);
            Ok((pref * i.value.norm(), pref * i.err))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

/// Samples of the limit profile; an all-zero grid is widened tenfold on each
/// side once before giving up.
pub fn limit_profile(datum: &ChirpDatum, z: &[f64]) -> Result<LimitProfile> {
    if z.is_empty() || z.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::OutOfRange("limit profile needs a non-empty grid of z > 0".into()));
    }
    let mut grid = z.to_vec();
    for attempt in 0..2 {
        let (v, err) = limit_values(datum, &grid)?;
        let lp = LimitProfile {
            n: datum.n,
            sigma: datum.sigma,
            z: grid.clone(),
            v,
            err,
        };
        if lp.max() > ZERO_PROFILE {
            return Ok(lp);
        }
        if attempt == 0 {
            let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min) / 10.0;
            let hi = grid.iter().cloned().fold(0.0, f64::max) * 10.0;
            grid = geometric_grid(lo, hi, grid.len().max(8));
        }
    }
    Err(Error::Numerical(format!(
        "limit profile of sigma={} vanishes on the widened grid",
        datum.sigma
    )))
}

pub fn default_z_grid() -> Vec<f64> {
    geometric_grid(0.05, 20.0, 60)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    pub n: usize,
    pub sigma: f64,
    pub window: (f64, f64),
    pub t: Vec<f64>,
    /// max over the window of |2|ψ|k_t^{n-σ} - V|, one per t.
    pub sup_distance: Vec<f64>,
}

impl CollapseReport {
    /// Each distance at most (1 + tolerance) times the previous one.
    pub fn is_decreasing(&self, tolerance: f64) -> bool {
        self.sup_distance
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + tolerance))
    }
}

/// Distance of the rescaled solutions to the limit profile on its annulus window.
pub fn collapse(datum: &ChirpDatum, ts: &[f64], z_grid: &[f64]) -> Result<CollapseReport> {
    let lp = limit_profile(datum, z_grid)?;
    let window = lp.window(WINDOW_LEVEL);
    let (z, v): (Vec<f64>, Vec<f64>) = lp
        .z
        .iter()
        .zip(&lp.v)
        .filter(|(&z, _)| z >= window.0 && z <= window.1)
        .unzip();
    let mut sup_distance = Vec::with_capacity(ts.len());
    for &t in ts {
        let frame = SelfSimilarFrame::new(t, z.clone())?;
        let w = rescaled_modulus(datum, &frame)?;
        sup_distance.push(w.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
    }
    Ok(CollapseReport {
        n: datum.n,
        sigma: datum.sigma,
        window,
        t: ts.to_vec(),
        sup_distance,
    })
}

/// (∫_{R₁ ≤ |x|/(2tk_t) ≤ R₂} |ψ(x, t)|^q dx)^{1/q}.
pub fn annulus_lq_norm(datum: &ChirpDatum, t: f64, window: (f64, f64), q: f64) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(ANNULUS_NODES);
    let (a, b) = window;
    let half = 0.5 * (b - a);
    let z: Vec<f64> = nodes.iter().map(|u| a + half * (u + 1.0)).collect();
    let frame = SelfSimilarFrame::new(t, z)?;
    let n = datum.n as i32;
    let terms = frame
        .z
        .par_iter()
        .zip(&weights)
        .map(|(&z, &w)| {
            let psi = chirp_solution(datum, t, frame.x_abs(z))?.abs();
            Ok(w * psi.powf(q) * z.powi(n - 1))
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum: f64 = terms.iter().sum();
    let jac = (2.0 * t * frame.k_t).powi(n);
    Ok((sphere_area(datum.n) * jac * half * sum).powf(1.0 / q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LqGrowth {
    pub n: usize,
    pub sigma: f64,
    pub q: f64,
    pub window: (f64, f64),
    pub t: Vec<f64>,
    pub k_t: Vec<f64>,
    pub norms: Vec<f64>,
    /// Slope of log ‖ψ‖ against log k_t²; negative means growth as t → 1.
    pub fit: DecayFit,
    pub predicted_exponent: f64,
    /// q > n/(n-σ); otherwise the norm stays bounded on the annulus.
    pub blowup: bool,
}

/// Annulus L^q norms along t → 1⁻ and their fitted exponent in k_t² = (1-t)/(4t).
pub fn lq_annulus_growth(datum: &ChirpDatum, q: f64, t_grid: &[f64]) -> Result<LqGrowth> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::OutOfRange(format!("annulus norm needs finite q >= 1, got {q}")));
    }
    if t_grid.len() < 3 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::OutOfRange(
            "time grid needs >= 3 strictly increasing points".into(),
        ));
    }
    let kts = t_grid.iter().map(|&t| k_t(t)).collect::<Result<Vec<f64>>>()?;
    let window = limit_profile(datum, &default_z_grid())?.window(WINDOW_LEVEL);
    let norms = t_grid
        .iter()
        .map(|&t| annulus_lq_norm(datum, t, window, q))
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = kts.iter().map(|k| (k * k).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, half_width, max_residual) = log_log_regression(&xs, &ys)?;
    Ok(LqGrowth {
        n: datum.n,
        sigma: datum.sigma,
        q,
        window,
        t: t_grid.to_vec(),
        k_t: kts,
        norms,
        fit: DecayFit {
            axis: Axis::Time,
            grid: t_grid.to_vec(),
            fitted_exponent: slope,
            half_width,
            max_residual,
        },
        predicted_exponent: datum.predicted_exponent(q),
        blowup: q > datum.blowup_threshold(),
    })
}

/// Lebesgue exponent in [1, ∞].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn new(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else if v >= 1.0 && v.is_finite() {
            Ok(Exponent::Finite(v))
        } else {
            Err(Error::OutOfRange(format!("exponent must lie in [1, inf], got {v}")))
        }
    }

    /// 1/p, with 1/∞ = 0.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(v) => 1.0 / v,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub(crate) fn from_recip(r: f64) -> Self {
        if r <= 0.0 {
            Exponent::Infinite
        } else {
            Exponent::Finite(1.0 / r)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Usage(format!("not an exponent: {other}")))?;
                Exponent::new(v)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => s.serialize_f64(*v),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(de::Error::custom),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Permitted,
    Forbidden,
    /// Passes every inequality but is the excluded classical endpoint (2, ∞, 2).
    ExcludedEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// 2/p + n/q = n/r.
    Scaling,
    /// p ≤ max{2qr/(n((r-1)q-r)₊), 4q/(((n+3)q-2n)₊)}.
    PUpperBound,
    /// p, q ≥ 2 for L² data.
    ClassicalRange,
    ExcludedEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub n: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub verdict: Verdict,
    pub binding: Option<Constraint>,
    /// Largest p the blow-up example allows; "inf" when every (·)₊ vanishes.
    pub p_bound: Exponent,
    pub scaling_residual: f64,
}

const GATE_TOL: f64 = 1e-12;

fn positive_part(v: f64) -> f64 {
    v.max(0.0)
}

/// max{2qr/(n((r-1)q-r)₊), 4q/(((n+3)q-2n)₊)}, a zero positive part giving no
/// finite bound.
pub fn p_upper_bound(n: usize, q: Exponent, r: Exponent) -> Exponent {
    let nf = n as f64;
    let (iq, ir) = (q.recip(), r.recip());
    // 2qr/(n((r-1)q-r)) = 2/(n(1 - 1/r - 1/q)) and 4q/((n+3)q-2n) = 4/(n+3-2n/q)
    let d1 = positive_part(nf * (1.0 - ir - iq));
    let d2 = positive_part(nf + 3.0 - 2.0 * nf * iq);
    if d1 <= GATE_TOL || d2 <= GATE_TOL {
        return Exponent::Infinite;
    }
    Exponent::Finite((2.0 / d1).max(4.0 / d2))
}

/// p with 2/p + n/q = n/r, if it lies in [1, ∞].
pub fn scaling_p(n: usize, q: Exponent, r: Exponent) -> Option<Exponent> {
    let ip = 0.5 * n as f64 * (r.recip() - q.recip());
    if ip < -GATE_TOL || ip > 1.0 + GATE_TOL {
        return None;
    }
    Some(Exponent::from_recip(ip))
}

/// Checks (p, q) against scaling, the blow-up bound on p and, for r = 2, the
/// classical conditions.
pub fn strichartz_gate(n: usize, p: Exponent, q: Exponent, r: Exponent) -> AdmissibilityVerdict {
    let nf = n as f64;
    let residual = 2.0 * p.recip() + nf * q.recip() - nf * r.recip();
    let p_bound = p_upper_bound(n, q, r);
    let within_bound = match (p, p_bound) {
        (_, Exponent::Infinite) => true,
        (Exponent::Infinite, Exponent::Finite(_)) => false,
        (Exponent::Finite(p), Exponent::Finite(b)) => p <= b * (1.0 + GATE_TOL),
    };
    let classical = r == Exponent::Finite(2.0);
    let (verdict, binding) = if residual.abs() > GATE_TOL {
        (Verdict::Forbidden, Some(Constraint::Scaling))
    } else if !within_bound {
        (Verdict::Forbidden, Some(Constraint::PUpperBound))
    } else if classical && (p.value() < 2.0 || q.value() < 2.0) {
        (Verdict::Forbidden, Some(Constraint::ClassicalRange))
    } else if classical && n == 2 && p == Exponent::Finite(2.0) && q == Exponent::Infinite {
        (Verdict::ExcludedEndpoint, Some(Constraint::ExcludedEndpoint))
    } else {
        (Verdict::Permitted, None)
    };
    AdmissibilityVerdict {
        n,
        p,
        q,
        r,
        verdict,
        binding,
        p_bound,
        scaling_residual: residual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTable {
    pub n: usize,
    pub r: Exponent,
    /// Permitted if any scanned pair is permitted.
    pub verdict: Verdict,
    pub pairs: Vec<AdmissibilityVerdict>,
}

/// Gate verdicts for scaling-compatible pairs: q = r(1 + 10^s) on a grid of
/// `samples` values s ∈ [-3, 3] plus q = ∞, p solved from scaling.
pub fn gate_scan(n: usize, r: Exponent, samples: usize) -> GateTable {
    let mut qs: Vec<Exponent> = match r {
        Exponent::Finite(r) => (0..samples)
            .map(|i| {
                let s = -3.0 + 6.0 * i as f64 / (samples.max(2) - 1) as f64;
                Exponent::Finite(r * (1.0 + 10f64.powf(s)))
            })
            .collect(),
        Exponent::Infinite => Vec::new(),
    };
    qs.push(Exponent::Infinite);
    let pairs: Vec<AdmissibilityVerdict> = qs
        .into_iter()
        .filter_map(|q| scaling_p(n, q, r).map(|p| strichartz_gate(n, p, q, r)))
        .collect();
    let verdict = if pairs.iter().any(|v| v.verdict == Verdict::Permitted) {
        Verdict::Permitted
    } else {
        Verdict::Forbidden
    };
    GateTable {
        n,
        r,
        verdict,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn datum_range_is_enforced() {
        assert!(ChirpDatum::new(3, 0.0).is_err());
        assert!(ChirpDatum::new(3, 3.0).is_err());
        assert!(ChirpDatum::new(2, -0.4).is_ok());
        assert!(ChirpDatum::new(3, 2.0).is_ok());
    }

    #[test]
    fn k_t_at_one_half() {
        assert_eq!(k_t(0.5).unwrap(), 0.5);
        assert!(k_t(1.0).is_err());
        assert!(k_t(0.0).is_err());
    }

    #[test]
    fn predicted_exponents() {
        let d = ChirpDatum::new(3, 2.0).unwrap();
        assert!((d.predicted_exponent(4.0) + 0.125).abs() < 1e-15);
        assert_eq!(d.blowup_threshold(), 3.0);
        assert_eq!(d.predicted_exponent(3.0), 0.0);
        let d = ChirpDatum::new(2, 1.0).unwrap();
        assert!((d.predicted_exponent(3.0) + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn lr_norm_matches_closed_form() {
        // |S^{n-1}| ∫_1^∞ ρ^{n-1-σr} dρ = |S^{n-1}|/(σr - n)
        for (n, sigma, r) in [(3, 2.0, 2.0), (2, 1.5, 3.0), (3, 1.0, 4.0)] {
            let d = ChirpDatum::new(n, sigma).unwrap();
            let got = d.lr_norm(e(r)).value().unwrap();
            let exact = (sphere_area(n) / (sigma * r - n as f64)).powf(1.0 / r);
            assert!((got - exact).abs() < 1e-6 * exact, "{n} {sigma} {r}: {got} vs {exact}");
        }
        assert_eq!(ChirpDatum::new(3, 1.0).unwrap().lr_norm(e(2.0)), NormValue::Divergent);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn limit_profile_is_nontrivial() {
        let d = ChirpDatum::new(3, 2.0).unwrap();
        let lp = limit_profile(&d, &geometric_grid(0.1, 10.0, 12)).unwrap();
        assert!(lp.max() > 0.01);
        let (a, b) = lp.window(WINDOW_LEVEL);
        assert!(a < b);
    }

    #[test]
    fn limit_profile_matches_direct_quadrature() {
        // n = 3: J_{1/2}(sz) = √(2/(π s z)) sin(sz), so
        // V(z) = (2z)^{-1/2} √(2/(πz)) |∫_0^∞ s^{1-σ} sin(sz) e^{is²} ds|
        let d = ChirpDatum::new(3, 2.0).unwrap();
        let z = 1.3;
        let lp = limit_profile(&d, &[z]).unwrap();
        // σ = 2: ∫_0^∞ s^{-1} sin(sz) e^{is²} ds on a rotated ray s = u e^{iπ/4}
        // is unsafe because sin grows; integrate on the real line instead.
        let f = |s: f64| {
            if s == 0.0 {
                return crate::Complex64::new(z, 0.0);
            }
            crate::Complex64::from_polar((s * z).sin() / s, s * s)
        };
        let head = crate::quad::integrate_panels(f, 0.0, 40.0, 800, default_quad());
        // ∫_40^∞ by one integration by parts of e^{is²}: ≈ -g(40) e^{i1600}/(2i·40)
        let g = (40.0 * z).sin() / 40.0;
        let tail = -crate::Complex64::from_polar(g / 80.0, 1600.0) / crate::Complex64::new(0.0, 1.0);
        let direct = (2.0 * z).powf(-0.5) * (2.0 / (PI * z)).sqrt() * (head.value + tail).norm();
        assert!((lp.v[0] - direct).abs() < 1e-4 * direct, "{} vs {direct}", lp.v[0]);
    }

    #[test]
    fn gate_examples() {
        let v = strichartz_gate(3, e(2.0), e(6.0), e(2.0));
        assert_eq!(v.verdict, Verdict::Permitted);
        let v = strichartz_gate(2, e(2.0), Exponent::Infinite, e(2.0));
        assert_eq!(v.verdict, Verdict::ExcludedEndpoint);
        let table = gate_scan(3, e(3.0), 25);
        assert!(!table.pairs.is_empty());
        assert_eq!(table.verdict, Verdict::Forbidden);
        assert!(table
            .pairs
            .iter()
            .all(|p| p.binding == Some(Constraint::PUpperBound)));
        let v = strichartz_gate(3, e(4.0), e(4.0), e(2.0));
        assert_eq!(v.binding, Some(Constraint::Scaling));
    }

    #[test]
    fn zero_positive_part_means_no_bound() {
        // q ≤ r/(r-1) and q ≤ 2n/(n+3) kill both denominators
        assert_eq!(p_upper_bound(2, e(1.0), e(1.5)), Exponent::Infinite);
        assert!(matches!(p_upper_bound(3, e(6.0), e(2.0)), Exponent::Finite(b) if (b - 2.0).abs() < 1e-12));
    }

    #[test]
    fn exponent_parsing_and_serde() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
        assert!("0.5".parse::<Exponent>().is_err());
        let s = serde_json::to_string(&[Exponent::Finite(2.0), Exponent::Infinite]).unwrap();
        assert_eq!(s, "[2.0,\"inf\"]");
        let back: Vec<Exponent> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Exponent::Finite(2.0), Exponent::Infinite]);
    }
}
