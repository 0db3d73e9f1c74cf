//! Empirical dispersive rates: envelope fits of |ψ| in t and |x|,
//! superpositions over finite discrete measures and the g_j integral estimates.

use crate::error::{Error, Result};
use crate::norms::{herglotz_decompose, norm_x, norm_ym, NormValue};
use crate::propagator::{decompose_g, evolve_radial, EvalPoint, Family, RadialProfile, Support};
use crate::quad::{integrate_panels, QuadOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Minimum number of grid points of a fit.
pub const MIN_FIT_POINTS: usize = 8;
/// Minimum span of a fit grid in decades.
pub const MIN_FIT_DECADES: f64 = 3.0;
/// Large-time gate factor: t ≥ GATE · |x| · R_support.
pub const LARGE_TIME_GATE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub fitted_exponent: f64,
    /// Half width of the 95% confidence band of the exponent.
    pub half_width: f64,
    /// Largest |residual| of the log-log regression.
    pub max_residual: f64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < MIN_FIT_POINTS {
        return Err(Error::OutOfRange(format!(
            "fit grid needs >= {MIN_FIT_POINTS} points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] <= 0.0 {
        return Err(Error::OutOfRange(
            "fit grid must be positive and strictly increasing".into(),
        ));
    }
    let decades = (grid[grid.len() - 1] / grid[0]).log10();
    if decades < MIN_FIT_DECADES - 1e-9 {
        return Err(Error::OutOfRange(format!(
            "fit grid spans {decades:.2} decades, need {MIN_FIT_DECADES}"
        )));
    }
    Ok(())
}

/// Geometric grid of `points` values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..points)
        .map(|i| lo * (r * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Least squares line y = a + b x. Returns (b, half width of the 95% band of b, max |residual|).
pub fn log_log_regression(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::Numerical(format!(
            "regression needs >= 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - a - b * x).collect();
    let s2 = res.iter().map(|r| r * r).sum::<f64>() / (nf - 2.0);
    let dist = StudentsT::new(0.0, 1.0, nf - 2.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let half = dist.inverse_cdf(0.975) * (s2 / sxx).sqrt();
    let max_res = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok((b, half, max_res))
}

/// Max-pools (grid, value) over dyadic blocks [2^k, 2^{k+1}) and fits the
/// log-log slope of the pooled maxima.
pub fn fit_envelope(axis: Axis, grid: &[f64], values: &[f64]) -> Result<DecayFit> {
    check_grid(grid)?;
    let mut pooled: Vec<(i64, f64, f64)> = Vec::new();
    for (&g, &v) in grid.iter().zip(values) {
        if !(v > 0.0) || !v.is_finite() {
            continue;
        }
        let block = g.log2().floor() as i64;
        match pooled.last_mut() {
            Some(last) if last.0 == block => {
                if v > last.2 {
                    last.1 = g;
                    last.2 = v;
                }
            }
            _ => pooled.push((block, g, v)),
        }
    }
    let xs: Vec<f64> = pooled.iter().map(|p| p.1.ln()).collect();
    let ys: Vec<f64> = pooled.iter().map(|p| p.2.ln()).collect();
    let (b, half, res) = log_log_regression(&xs, &ys)?;
    Ok(DecayFit {
        axis,
        grid: grid.to_vec(),
        fitted_exponent: b,
        half_width: half,
        max_residual: res,
    })
}

/// Pieces φ_ω e^{iωr} whose norms control the datum: Herglotz data are split
/// into the η pair, sums into their parts.
pub fn datum_components(profile: &RadialProfile) -> Result<Vec<RadialProfile>> {
    match profile.family() {
        Family::Herglotz { n, omega } => {
            let k = if n % 2 == 1 { 0 } else { 6 };
            let (eta, bar) = herglotz_decompose(omega * profile.dilation(), *n, k)?;
            let amp = profile.amplitude();
            Ok(vec![eta.with_amplitude(amp), bar.with_amplitude(amp)])
        }
        Family::Sum(parts)
            if profile.dilation() == 1.0 && profile.amplitude() == Complex64::new(1.0, 0.0) =>
        {
            let mut out = Vec::new();
            for p in parts {
                out.extend(datum_components(p)?);
            }
            Ok(out)
        }
        _ => Ok(vec![profile.clone()]),
    }
}

fn require_finite(v: NormValue, which: &str) -> Result<f64> {
    v.value().ok_or_else(|| Error::DivergentNorm {
        which: which.to_string(),
    })
}

/// Σ over the datum components of ‖φ_ω‖_{Y_m}; an error if one diverges.
pub fn component_ym(profile: &RadialProfile, n: usize, m: usize) -> Result<f64> {
    datum_components(profile)?
        .iter()
        .map(|c| require_finite(norm_ym(c, n, m)?, &format!("Y{m}")))
        .sum()
}

/// Σ over the datum components of ‖φ_ω‖_X; an error if one diverges.
pub fn component_x(profile: &RadialProfile, n: usize) -> Result<f64> {
    datum_components(profile)?
        .iter()
        .map(|c| {
            let (a, b) = norm_x(c, n)?;
            require_finite(a.plus(b), "X")
        })
        .sum()
}

/// Smallest time of the large-time regime at |x|: 10·|x|·R_support for compact data.
pub fn large_time_gate(profile: &RadialProfile, x_abs: f64) -> Option<f64> {
    match profile.support() {
        Support::Compact { hi, .. } => Some(LARGE_TIME_GATE * x_abs * hi),
        Support::Tail { .. } => None,
    }
}

fn abs_grid(profile: &RadialProfile, n: usize, pts: &[(f64, f64)]) -> Result<Vec<f64>> {
    pts.par_iter()
        .map(|&(x, t)| Ok(evolve_radial(profile, EvalPoint::new(n, x, t)?)?.abs()))
        .collect()
}

/// Envelope fit of sup_{x ∈ x_probes} |ψ(x, t)| against t.
pub fn time_decay_fit(
    profile: &RadialProfile,
    n: usize,
    m: usize,
    x_probes: &[f64],
    t_grid: &[f64],
) -> Result<DecayFit> {
    check_grid(t_grid)?;
    if x_probes.is_empty() {
        return Err(Error::OutOfRange("empty x probe set".into()));
    }
    component_ym(profile, n, m)?;
    for &x in x_probes {
        if let Some(gate) = large_time_gate(profile, x) {
            if t_grid[0] < gate {
                return Err(Error::OutOfRange(format!(
                    "time grid starts at {} below the large-time gate {gate} for |x|={x}",
                    t_grid[0]
                )));
            }
        }
    }
    let pts: Vec<(f64, f64)> = t_grid
        .iter()
        .flat_map(|&t| x_probes.iter().map(move |&x| (x, t)))
        .collect();
    let vals = abs_grid(profile, n, &pts)?;
    let sup: Vec<f64> = vals
        .chunks(x_probes.len())
        .map(|c| c.iter().fold(0.0f64, |a, &b| a.max(b)))
        .collect();
    fit_envelope(Axis::Time, t_grid, &sup)
}

/// Envelope fit of sup_{t ∈ t_probes} |ψ(x, t)| against |x|.
pub fn space_decay_fit(
    profile: &RadialProfile,
    n: usize,
    t_probes: &[f64],
    x_grid: &[f64],
) -> Result<DecayFit> {
    check_grid(x_grid)?;
    if t_probes.is_empty() {
        return Err(Error::OutOfRange("empty t probe set".into()));
    }
    component_x(profile, n)?;
    let pts: Vec<(f64, f64)> = x_grid
        .iter()
        .flat_map(|&x| t_probes.iter().map(move |&t| (x, t)))
        .collect();
    let vals = abs_grid(profile, n, &pts)?;
    let sup: Vec<f64> = vals
        .chunks(t_probes.len())
        .map(|c| c.iter().fold(0.0f64, |a, &b| a.max(b)))
        .collect();
    fit_envelope(Axis::Space, x_grid, &sup)
}

/// Largest ratio |ψ| / (t^{(m-n)/2} ‖φ‖_{Y_m}) over the probe points.
pub fn time_domination_constant(
    profile: &RadialProfile,
    n: usize,
    m: usize,
    pts: &[(f64, f64)],
) -> Result<f64> {
    let norm = component_ym(profile, n, m)?;
    let vals = abs_grid(profile, n, pts)?;
    let e = (m as f64 - n as f64) / 2.0;
    Ok(pts
        .iter()
        .zip(vals)
        .map(|(&(_, t), v)| v / (t.powf(e) * norm))
        .fold(0.0, f64::max))
}

/// Largest ratio |ψ| / (|x|^{(1-n)/2} ‖φ‖_X) over the probe points.
pub fn space_domination_constant(
    profile: &RadialProfile,
    n: usize,
    pts: &[(f64, f64)],
) -> Result<f64> {
    let norm = component_x(profile, n)?;
    let vals = abs_grid(profile, n, pts)?;
    let e = (1.0 - n as f64) / 2.0;
    Ok(pts
        .iter()
        .zip(vals)
        .map(|(&(x, _), v)| v / (x.powf(e) * norm))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub weight: Complex64,
    /// φ_ω with its carrier ω.
    pub profile: RadialProfile,
}

/// A finite measure Σ_j w_j δ_{ω_j} with envelopes φ_{ω_j}.
#[derive(Debug, Clone, Default)]
pub struct DiscreteMeasure {
    pub atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    pub fn push(&mut self, weight: Complex64, profile: RadialProfile) {
        self.atoms.push(Atom { weight, profile });
    }

    /// Herglotz waves Σ w_j r^{(2-n)/2}J(ω_j r), as atoms (ω_j, η_{ω_j}) and (-ω_j, η̄_{ω_j}).
    pub fn herglotz(n: usize, waves: &[(f64, Complex64)], k: usize) -> Result<Self> {
        let mut m = DiscreteMeasure::default();
        for &(omega, w) in waves {
            let (eta, bar) = herglotz_decompose(omega, n, k)?;
            m.push(w, eta);
            m.push(w, bar);
        }
        Ok(m)
    }

    fn weighted(&self) -> Vec<RadialProfile> {
        self.atoms
            .iter()
            .map(|a| {
                let amp = a.profile.amplitude() * a.weight;
                a.profile.clone().with_amplitude(amp)
            })
            .collect()
    }

    /// The datum Σ_j w_j φ_{ω_j}(r) e^{iω_j r}.
    pub fn datum(&self) -> Result<RadialProfile> {
        RadialProfile::sum(self.weighted())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpositionProbe {
    pub x_abs: f64,
    pub t: f64,
    pub psi_abs: f64,
    /// |ψ_μ − Σ_j w_j ψ_j|
    pub linearity_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperpositionReport {
    pub n: usize,
    pub m: usize,
    pub probes: Vec<SuperpositionProbe>,
    /// Σ|w_j|(‖φ_j‖_X + ‖φ_j‖_{Y_n})
    pub space_weight: f64,
    /// Σ|w_j|(‖φ_j‖_{Y_{n-m}} + ‖φ_j‖_{Y_n}); None when a Y_{n-m} norm diverges.
    pub time_weight: Option<f64>,
    /// max |ψ| / ((1+|x|)^{(1-n)/2} space_weight)
    pub space_constant: f64,
    /// max |ψ| (1+t)^{m/2} / time_weight
    pub time_constant: Option<f64>,
    pub max_linearity_err: f64,
    pub max_abs: f64,
}

/// Both superposition bounds over `pts`, with the per-atom linearity check.
pub fn superposition_bound(
    measure: &DiscreteMeasure,
    n: usize,
    m: usize,
    pts: &[(f64, f64)],
) -> Result<SuperpositionReport> {
    if measure.atoms.is_empty() || pts.is_empty() {
        return Err(Error::OutOfRange(
            "superposition needs atoms and probe points".into(),
        ));
    }
    if m > n {
        return Err(Error::OutOfRange(format!("m={m} exceeds n={n}")));
    }
    let mut space_weight = 0.0;
    let mut time_weight = Some(0.0);
    for a in &measure.atoms {
        let w = a.weight.norm();
        let (x1, x2) = norm_x(&a.profile, n)?;
        let x = require_finite(x1.plus(x2), "X")?;
        let yn = require_finite(norm_ym(&a.profile, n, n)?, &format!("Y{n}"))?;
        space_weight += w * (x + yn);
        time_weight = match (time_weight, norm_ym(&a.profile, n, n - m)?.value()) {
            (Some(acc), Some(v)) => Some(acc + w * (v + yn)),
            _ => None,
        };
    }
    let datum = measure.datum()?;
    let parts = measure.weighted();
    let probes = pts
        .par_iter()
        .map(|&(x, t)| {
            let pt = EvalPoint::new(n, x, t)?;
            let total = evolve_radial(&datum, pt)?.value;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &parts {
                acc += evolve_radial(p, pt)?.value;
            }
            Ok(SuperpositionProbe {
                x_abs: x,
                t,
                psi_abs: total.norm(),
                linearity_err: (total - acc).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let e = (1.0 - n as f64) / 2.0;
    let space_constant = probes
        .iter()
        .map(|p| p.psi_abs / ((1.0 + p.x_abs).powf(e) * space_weight))
        .fold(0.0, f64::max);
    let time_constant = time_weight.map(|w| {
        probes
            .iter()
            .map(|p| p.psi_abs * (1.0 + p.t).powf(m as f64 / 2.0) / w)
            .fold(0.0, f64::max)
    });
    Ok(SuperpositionReport {
        n,
        m,
        space_weight,
        time_weight,
        space_constant,
        time_constant,
        max_linearity_err: probes.iter().map(|p| p.linearity_err).fold(0.0, f64::max),
        max_abs: probes.iter().map(|p| p.psi_abs).fold(0.0, f64::max),
        probes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GjReport {
    pub n: usize,
    pub m: usize,
    pub x_abs: f64,
    pub t: f64,
    /// ∫|g_{1,a_1}^{(m)}| dρ
    pub lhs1: f64,
    pub rhs1: f64,
    /// ∫|g_{2,a_2}^{(m)}| + |g_{3,a_3}^{(m)}| dρ
    pub lhs23: f64,
    pub rhs23: f64,
}

impl GjReport {
    /// Largest lhs/rhs ratio of the two estimates.
    pub fn constant(&self) -> f64 {
        let r = |l: f64, r: f64| if l == 0.0 { 0.0 } else { l / r };
        r(self.lhs1, self.rhs1).max(r(self.lhs23, self.rhs23))
    }
}

/// Quadrature of both sides of the g_j derivative estimates at one point.
/// The right sides are integrated in ρ with r = 2√t ρ and carry the indicator
/// supports kr ≤ 1 (g_1) and kr ≥ 1/2 (g_2, g_3).
pub fn gj_integral_check(
    profile: &RadialProfile,
    n: usize,
    m: usize,
    pt: EvalPoint,
) -> Result<GjReport> {
    if m > n {
        return Err(Error::OutOfRange(format!("m={m} exceeds n={n}")));
    }
    let support = profile.support();
    let Support::Compact { lo, hi } = support else {
        return Err(Error::OutOfRange(
            "g_j integral check needs compactly supported data".into(),
        ));
    };
    let k_trunc = if n % 2 == 1 { 0 } else { 6 };
    let dec = decompose_g(profile, pt, k_trunc)?;
    let lhs1 = dec
        .abs_derivative_integral(1, m, None)
        .unwrap_or(f64::INFINITY);
    let lhs23 = dec
        .abs_derivative_integral(2, m, None)
        .unwrap_or(f64::INFINITY)
        + dec
            .abs_derivative_integral(3, m, None)
            .unwrap_or(f64::INFINITY);

    let (x, t, k) = (pt.x_abs, pt.t, pt.k());
    let nf = n as f64;
    let st = t.sqrt();
    let d_rho = 1.0 / (2.0 * st);
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-9,
        max_intervals: 20_000,
    };
    let integrate = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        integrate_panels(|r| Complex64::new(f(r), 0.0), a, b, 16, opts)
            .value
            .re
            * d_rho
    };
    let d = |r: f64, j: usize| profile.envelope_derivative(r, j).norm();

    let hi1 = hi.min(1.0 / k);
    let rhs1 = if m < n {
        let f = |r: f64| {
            (0..=m)
                .map(|j| d(r, j) * r.powi((n - m + j - 1) as i32))
                .sum::<f64>()
        };
        x.powf((nf - 2.0) / 2.0) * st.powf(m as f64 - nf + 2.0) * integrate(&f, lo, hi1)
    } else {
        let f1 = |r: f64| (1..=n).map(|j| d(r, j) * r.powi(j as i32 - 1)).sum::<f64>();
        let f2 = |r: f64| d(r, 0) * r;
        x.powf((nf - 2.0) / 2.0) * t * integrate(&f1, lo, hi1)
            + x.powf((nf + 2.0) / 2.0) / t * integrate(&f2, lo, hi1)
    };
    let lo23 = lo.max(0.5 / k);
    let f23 = |r: f64| {
        (0..=m)
            .map(|j| d(r, j) * r.powf((nf - 1.0) / 2.0 - m as f64 + j as f64))
            .sum::<f64>()
    };
    let rhs23 = x.powf(-0.5) * st.powf(1.0 + m as f64) * integrate(&f23, lo23, hi);
    Ok(GjReport {
        n,
        m,
        x_abs: x,
        t,
        lhs1,
        rhs1,
        lhs23,
        rhs23,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_recovers_exact_power() {
        let grid = geometric_grid(1.0, 1e4, 40);
        let vals: Vec<f64> = grid.iter().map(|t| 3.0 * t.powf(-1.25)).collect();
        let fit = fit_envelope(Axis::Time, &grid, &vals).unwrap();
        assert!((fit.fitted_exponent + 1.25).abs() < 1e-12);
        assert!(fit.half_width < 1e-10 && fit.max_residual < 1e-10);
    }

    #[test]
    fn pooling_follows_upper_envelope() {
        let grid = geometric_grid(1.0, 1e4, 400);
        let vals: Vec<f64> = grid
            .iter()
            .map(|x| x.powf(-1.0) * (x.sin().abs() + 1e-3))
            .collect();
        let fit = fit_envelope(Axis::Space, &grid, &vals).unwrap();
        assert!(
            (fit.fitted_exponent + 1.0).abs() < 0.05,
            "{}",
            fit.fitted_exponent
        );
    }

    #[test]
    fn grid_invariants_enforced() {
        assert!(check_grid(&geometric_grid(1.0, 100.0, 20)).is_err());
        assert!(check_grid(&geometric_grid(1.0, 1e3, 5)).is_err());
        assert!(check_grid(&[1.0, 10.0, 5.0, 100.0, 1e3, 1e4, 1e5, 1e6]).is_err());
    }

    #[test]
    fn bump_time_decay_is_classical_rate() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        let grid = geometric_grid(40.0, 4e4, 16);
        let fit = time_decay_fit(&p, 3, 0, &[0.5, 1.0, 2.0], &grid).unwrap();
        assert!(
            (fit.fitted_exponent + 1.5).abs() < 0.1,
            "{}",
            fit.fitted_exponent
        );
        assert!(time_decay_fit(&p, 3, 0, &[2.0], &geometric_grid(1.0, 1e3, 16)).is_err());
    }

    #[test]
    fn divergent_norm_is_rejected() {
        let p = RadialProfile::power(0.5).unwrap();
        let err = time_decay_fit(&p, 3, 0, &[1.0], &geometric_grid(1.0, 1e3, 10)).unwrap_err();
        assert!(matches!(err, Error::DivergentNorm { .. }));
    }

    #[test]
    fn herglotz_measure_is_linear_and_bounded() {
        let m = DiscreteMeasure::herglotz(
            3,
            &[
                (1.0, Complex64::new(1.0, 0.0)),
                (2.0, Complex64::new(1.0, 0.0)),
            ],
            0,
        )
        .unwrap();
        let pts: Vec<(f64, f64)> = [0.5, 3.0, 20.0]
            .iter()
            .flat_map(|&x| [0.5, 5.0, 50.0].map(|t| (x, t)))
            .collect();
        let rep = superposition_bound(&m, 3, 0, &pts).unwrap();
        assert!(rep.max_linearity_err < 1e-10, "{}", rep.max_linearity_err);
        assert!(rep.space_constant.is_finite() && rep.time_constant.unwrap().is_finite());
    }

    #[test]
    fn gj_estimates_hold_for_bump() {
        let p = RadialProfile::bump(1.0, 2.0).unwrap();
        for &(x, t) in &[(0.5, 1.0), (2.0, 1.0), (3.0, 0.5), (10.0, 2.0), (1.0, 10.0)] {
            let rep = gj_integral_check(&p, 3, 2, EvalPoint::new(3, x, t).unwrap()).unwrap();
            assert!(rep.constant() <= 50.0, "{rep:?}");
        }
    }
}
