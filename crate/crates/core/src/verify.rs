//! Acceptance suite: eight criteria, each a list of named numeric checks with
//! pinned tolerances.

use crate::appendix::{
    envelope_grid, lr_member_predicted, necessary_p_bound, phi_decay_exponent, phi_decay_fit,
    phi_lr_norms, psi_time_fit,
};
use crate::blowup::{
    collapse, default_z_grid, gate_scan, lq_annulus_growth, strichartz_gate, t_grid_to_one,
    ChirpDatum, Exponent, Verdict,
};
use crate::decay::{
    geometric_grid, large_time_gate, log_log_regression, space_decay_fit, time_decay_fit,
};
use crate::error::{Error, Result};
use crate::norms::{membership_scan, FamilySpec, FamilyTag, NormKind};
use crate::propagator::{evolve_oracle_report, evolve_radial, EvalPoint, OracleGrid, RadialProfile};
use crate::quad::{integrate_panels, QuadOptions};
use crate::special::fresnel::{xi0, xi_at_zero};
use crate::special::{fresnel_xi, splitting_residual};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::time::{Duration, Instant};

/// (id, name, runtime limit in seconds).
pub const CRITERIA: [(u8, &str, f64); 8] = [
    (1, "fresnel", 10.0),
    (2, "splitting", 10.0),
    (3, "propagator_oracle", 120.0),
    (4, "membership_thresholds", 60.0),
    (5, "dispersive_rates", 300.0),
    (6, "blowup", 300.0),
    (7, "strichartz_gates", 1.0),
    (8, "appendix_rates", 300.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// value ≤ target + tol
    AtMost,
    /// |value − target| ≤ tol
    Near,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(id: String, value: Result<f64>, target: f64, tol: f64, comparison: Comparison) -> Self {
        let (value, note) = match value {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let mut c = Check {
            id,
            value,
            target,
            tol,
            comparison,
            passed: false,
            note,
        };
        c.set_tol(tol);
        c
    }

    /// Replaces the tolerance and re-evaluates the verdict.
    pub fn set_tol(&mut self, tol: f64) {
        self.tol = tol;
        self.passed = match self.comparison {
            Comparison::AtMost => self.value <= self.target + tol,
            Comparison::Near => (self.value - self.target).abs() <= tol,
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub runtime_limit_s: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn within_time(&self) -> bool {
        self.elapsed.as_secs_f64() <= self.runtime_limit_s
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Sink(Vec<Check>);

impl Sink {
    fn at_most(&mut self, id: impl Into<String>, value: Result<f64>, bound: f64) {
        self.0
            .push(Check::new(id.into(), value, bound, 0.0, Comparison::AtMost));
    }

    fn below(&mut self, id: impl Into<String>, value: Result<f64>, target: f64, tol: f64) {
        self.0
            .push(Check::new(id.into(), value, target, tol, Comparison::AtMost));
    }

    fn near(&mut self, id: impl Into<String>, value: Result<f64>, target: f64, tol: f64) {
        self.0
            .push(Check::new(id.into(), value, target, tol, Comparison::Near));
    }
}

/// Runs criterion `id` (1..=8).
pub fn run(id: u8) -> Result<CriterionReport> {
    let &(_, name, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Usage(format!("unknown criterion {id}, expected 1..=8")))?;
    let start = Instant::now();
    let mut sink = Sink::default();
    match id {
        1 => fresnel_suite(&mut sink),
        2 => splitting_suite(&mut sink),
        3 => oracle_suite(&mut sink),
        4 => membership_suite(&mut sink),
        5 => dispersive_suite(&mut sink),
        6 => blowup_suite(&mut sink),
        7 => gate_suite(&mut sink),
        _ => appendix_suite(&mut sink),
    }
    let elapsed = start.elapsed();
    let checks = sink.0;
    Ok(CriterionReport {
        id,
        name,
        runtime_limit_s: limit,
        passed: checks.iter().all(|c| c.passed),
        checks,
        elapsed,
    })
}

/// Parses "all" or a comma-separated list of criterion ids.
pub fn parse_suite(spec: &str) -> Result<Vec<u8>> {
    if spec == "all" {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    spec.split(',')
        .map(|s| {
            let s = s.trim();
            CRITERIA
                .iter()
                .find(|c| c.0.to_string() == s || c.1 == s)
                .map(|c| c.0)
                .ok_or_else(|| Error::Usage(format!("unknown suite '{s}'")))
        })
        .collect()
}

fn fact(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, v| acc * v as f64)
}

/// Ξ^m_a(s) by quadrature of ∫_s^∞ (ρ−s)^m/m! e^{i(ρ²+aρ)} dρ along ρ = s + u e^{iπ/4},
/// without completing the square.
pub fn xi_by_ray(m: usize, a: f64, s: f64) -> Complex64 {
    let dir = Complex64::from_polar(1.0, FRAC_PI_4);
    let i = Complex64::new(0.0, 1.0);
    // |integrand| = u^m exp(−u² − (2s+a)u/√2)
    let c = (2.0 * s + a) / SQRT_2;
    let upper = 0.5 * (-c).max(0.0) + (0.25 * c * c + 60.0).sqrt() + m as f64;
    let r = integrate_panels(
        |u| {
            let rho = s + dir * u;
            (dir * u).powi(m as i32) * (i * (rho * rho + rho * a)).exp()
        },
        0.0,
        upper,
        8,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 20_000,
        },
    );
    r.value * dir / fact(m)
}

const FRESNEL_A: [f64; 7] = [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0];
const FRESNEL_S: [f64; 7] = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0];

fn fresnel_suite(sink: &mut Sink) {
    let exact = Complex64::from_polar(PI.sqrt() / 2.0, FRAC_PI_4);
    sink.at_most("c1.xi_origin", Ok((xi0(0, 0.0) - exact).norm()), 1e-10);
    sink.at_most(
        "c1.xi_origin_closed_form",
        Ok((xi_at_zero(0) - exact).norm()),
        1e-14,
    );
    for m in 0..=2 {
        let mut identity = 0.0f64;
        let mut library = 0.0f64;
        for &a in &FRESNEL_A {
            for &s in &FRESNEL_S {
                let direct = xi_by_ray(m, a, s);
                let shifted = Complex64::from_polar(1.0, -a * a / 4.0) * xi_by_ray(m, 0.0, s + a / 2.0);
                identity = identity.max((direct - shifted).norm());
                library = library.max((fresnel_xi(m, a, s) - direct).norm());
            }
        }
        sink.at_most(format!("c1.shift_identity.m{m}"), Ok(identity), 1e-10);
        sink.at_most(format!("c1.library_vs_ray.m{m}"), Ok(library), 1e-10);
    }
    let s = 50.0;
    for k in 0..=3usize {
        let lead = Complex64::new(0.0, -2.0 * s).powi(k as i32 + 1);
        let z = (1.0 - lead * xi0(k, s) * Complex64::from_polar(1.0, -s * s)) * (s * s);
        let want = Complex64::new(0.0, ((k + 2) * (k + 1)) as f64 / 4.0);
        let scale = ((k + 2) * (k + 1)) as f64 / 4.0;
        sink.at_most(format!("c1.z_limit.k{k}"), Ok((z - want).norm()), 0.05 * scale);
    }
}

const SPLIT_LO: f64 = 20.0;
const SPLIT_HI: f64 = 160.0;
const SPLIT_STEP: f64 = 0.02;

/// Local maxima of the splitting residual over consecutive windows of length 2π.
fn residual_envelope(n: usize, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let steps = ((SPLIT_HI - SPLIT_LO) / SPLIT_STEP).round() as usize;
    let window = 2.0 * PI;
    let mut zs = Vec::new();
    let mut maxima = Vec::new();
    let mut current: Option<(usize, f64, f64)> = None;
    for i in 0..=steps {
        let z = SPLIT_LO + i as f64 * SPLIT_STEP;
        let w = ((z - SPLIT_LO) / window) as usize;
        let r = splitting_residual(n, k, z)?;
        match current {
            Some((cw, _, best)) if cw == w => {
                if r > best {
                    current = Some((w, z, r));
                }
            }
            _ => {
                if let Some((_, bz, br)) = current {
                    zs.push(bz);
                    maxima.push(br);
                }
                current = Some((w, z, r));
            }
        }
    }
    // the last window is partial; drop it
    Ok((zs, maxima))
}

fn splitting_slope(n: usize, k: usize) -> Result<f64> {
    let (zs, m) = residual_envelope(n, k)?;
    let xs: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
    let ys: Vec<f64> = m.iter().map(|v| v.ln()).collect();
    Ok(log_log_regression(&xs, &ys)?.0)
}

fn splitting_suite(sink: &mut Sink) {
    for n in [2usize, 4] {
        for k in [0usize, 1, 3] {
            let target = (n as f64 - 1.0) / 2.0 - k as f64 - 1.0;
            sink.near(
                format!("c2.slope.n{n}.k{k}"),
                splitting_slope(n, k),
                target,
                0.15,
            );
        }
    }
    for k in [0usize, 1, 3] {
        let max = residual_envelope(3, k).map(|(_, m)| m.into_iter().fold(0.0, f64::max));
        sink.at_most(format!("c2.exact.n3.k{k}"), max, 1e-9);
    }
}

fn oracle_profiles() -> Result<Vec<(&'static str, usize, RadialProfile)>> {
    Ok(vec![
        ("bump_1_2", 3, RadialProfile::bump(1.0, 2.0)?),
        ("bump_0_2", 2, RadialProfile::bump(0.0, 2.0)?),
        (
            "bump_0_1.5_carrier",
            3,
            RadialProfile::bump(0.0, 1.5)?.with_carrier(2.0),
        ),
        ("bump_0.5_3", 4, RadialProfile::bump(0.5, 3.0)?),
        ("gaussian", 2, RadialProfile::gaussian(1.0)?),
    ])
}

const ORACLE_X: [f64; 3] = [0.5, 1.5, 3.0];
const ORACLE_T: [f64; 2] = [0.25, 1.0];

fn oracle_relative(profile: &RadialProfile, n: usize) -> Result<(f64, f64)> {
    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for &t in &ORACLE_T {
        let grid = OracleGrid::for_profile(profile, t)?;
        for &x in &ORACLE_X {
            let pt = EvalPoint::new(n, x, t)?;
            let o = evolve_oracle_report(profile, pt, grid)?;
            let f = evolve_radial(profile, pt)?.value;
            worst = worst.max((o.amplitude.value - f).norm() / f.norm());
            drift = drift.max(o.mass_drift);
        }
    }
    Ok((worst, drift))
}

/// (1 + 4it)^{−n/2} exp(−|x|²/(1 + 4it)) for the datum e^{−|x|²}.
pub fn gaussian_solution(n: usize, x: f64, t: f64) -> Complex64 {
    let d = Complex64::new(1.0, 4.0 * t);
    d.powf(-(n as f64) / 2.0) * (-(x * x) / d).exp()
}

fn gaussian_error() -> Result<f64> {
    let p = RadialProfile::gaussian(1.0)?;
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4] {
        for &x in &[0.01, 0.5, 2.0, 5.0] {
            for &t in &[0.1, 1.0, 10.0] {
                let exact = gaussian_solution(n, x, t);
                let v = evolve_radial(&p, EvalPoint::new(n, x, t)?)?.value;
                worst = worst.max((v - exact).norm() / exact.norm());
            }
        }
    }
    Ok(worst)
}

fn herglotz_modulus_error(n: usize) -> Result<f64> {
    let p = RadialProfile::herglotz(n, 1.0)?;
    let mut worst = 0.0f64;
    for &x in &[0.5, 3.0, 20.0] {
        let phi = p.datum(x).norm();
        for &t in &[0.5, 5.0, 50.0] {
            let psi = evolve_radial(&p, EvalPoint::new(n, x, t)?)?.abs();
            worst = worst.max((psi - phi).abs());
        }
    }
    Ok(worst)
}

fn oracle_suite(sink: &mut Sink) {
    match oracle_profiles() {
        Ok(profiles) => {
            for (name, n, p) in profiles {
                let r = oracle_relative(&p, n);
                sink.at_most(
                    format!("c3.oracle.{name}"),
                    r.as_ref().map(|v| v.0).map_err(Clone::clone),
                    1e-3,
                );
                if name == "gaussian" {
                    sink.at_most("c3.mass_drift", r.map(|v| v.1), 1e-5);
                }
            }
        }
        Err(e) => sink.at_most("c3.oracle", Err(e), 1e-3),
    }
    sink.at_most("c3.gaussian_closed_form", gaussian_error(), 1e-4);
    for n in [2usize, 3] {
        sink.at_most(
            format!("c3.herglotz_modulus.n{n}"),
            herglotz_modulus_error(n),
            1e-4,
        );
    }
}

const SCAN_STEP: f64 = 0.05;

/// Parameters threshold ± 0.5 on the 0.05 lattice, kept positive.
fn scan_params(threshold: f64) -> Vec<f64> {
    (-10..=10)
        .map(|i| threshold + SCAN_STEP * i as f64)
        .filter(|&a| a > 1e-9)
        .map(|a| (a / SCAN_STEP).round() * SCAN_STEP)
        .collect()
}

/// First finite parameter after the last divergent one; the first parameter
/// when nothing diverges.
fn empirical_threshold(tag: FamilyTag, n: usize, kind: NormKind, predicted: f64) -> Result<f64> {
    let params = scan_params(predicted);
    let scan = membership_scan(&FamilySpec::new(tag), n, kind, &params)?;
    let last_div = scan.points.iter().rposition(|p| !p.value.is_finite());
    match last_div {
        None => Ok(params[0]),
        Some(i) if i + 1 < params.len() => Ok(params[i + 1]),
        Some(_) => Err(Error::Numerical(format!(
            "{kind} diverges over the whole scan for n={n}"
        ))),
    }
}

fn membership_suite(sink: &mut Sink) {
    let tol = SCAN_STEP + 1e-9;
    for n in [2usize, 3, 4] {
        let nf = n as f64;
        sink.near(
            format!("c4.x_power.n{n}"),
            empirical_threshold(FamilyTag::Power, n, NormKind::X, (nf - 1.0) / 2.0),
            (nf - 1.0) / 2.0,
            tol,
        );
        sink.near(
            format!("c4.x_oscillating.n{n}"),
            empirical_threshold(FamilyTag::OscillatingPower, n, NormKind::X, (nf + 1.0) / 2.0),
            (nf + 1.0) / 2.0,
            tol,
        );
        for m in 0..=n {
            let predicted = (n - m) as f64;
            sink.near(
                format!("c4.y{m}_power.n{n}"),
                empirical_threshold(FamilyTag::Power, n, NormKind::Y(m), predicted),
                predicted,
                tol,
            );
        }
    }
}

const TIME_PROBES: [f64; 3] = [0.5, 1.0, 2.0];
const SPACE_PROBES: [f64; 3] = [1.0, 10.0, 100.0];

fn time_fit(p: &RadialProfile, n: usize, m: usize) -> Result<f64> {
    let gate = large_time_gate(p, 2.0).unwrap_or(1.0);
    let grid = geometric_grid(gate, gate * 1e4, 13);
    Ok(time_decay_fit(p, n, m, &TIME_PROBES, &grid)?.fitted_exponent)
}

fn space_fit(p: &RadialProfile, n: usize) -> Result<f64> {
    let grid = geometric_grid(1.0, 1e3, 31);
    Ok(space_decay_fit(p, n, &SPACE_PROBES, &grid)?.fitted_exponent)
}

fn dispersive_suite(sink: &mut Sink) {
    struct Case {
        name: &'static str,
        n: usize,
        profile: Result<RadialProfile>,
        m: Option<usize>,
        space: bool,
    }
    let case = |name, n, profile, m, space| Case {
        name,
        n,
        profile,
        m,
        space,
    };
    let cases = [
        case("bump", 2, RadialProfile::bump(0.0, 2.0), Some(0), true),
        case("gaussian", 2, RadialProfile::gaussian(1.0), Some(0), true),
        case("power3.5", 2, RadialProfile::power(3.5), Some(0), false),
        case("power2.5", 2, RadialProfile::power(2.5), Some(1), false),
        case("osc_power3.5", 2, RadialProfile::osc_power(3.5), Some(0), false),
        case("herglotz", 2, RadialProfile::herglotz(2, 1.0), Some(2), true),
        case("bump", 3, RadialProfile::bump(0.0, 2.0), Some(0), true),
        case("power4.5", 3, RadialProfile::power(4.5), Some(0), false),
        case("power2.5", 3, RadialProfile::power(2.5), Some(1), false),
        case("herglotz", 3, RadialProfile::herglotz(3, 1.0), None, true),
    ];
    for c in cases {
        let nf = c.n as f64;
        let p = match c.profile {
            Ok(p) => p,
            Err(e) => {
                sink.at_most(format!("c5.{}.n{}", c.name, c.n), Err(e), 0.0);
                continue;
            }
        };
        if let Some(m) = c.m {
            let fit = time_fit(&p, c.n, m);
            if c.name == "bump" {
                sink.near(
                    format!("c5.time.{}.n{}.m{m}", c.name, c.n),
                    fit,
                    -nf / 2.0,
                    0.1,
                );
            } else {
                sink.below(
                    format!("c5.time.{}.n{}.m{m}", c.name, c.n),
                    fit,
                    (m as f64 - nf) / 2.0,
                    0.1,
                );
            }
        }
        if c.space {
            sink.below(
                format!("c5.space.{}.n{}", c.name, c.n),
                space_fit(&p, c.n),
                (1.0 - nf) / 2.0,
                0.1,
            );
        }
    }
}

const COLLAPSE_T: [f64; 3] = [0.9, 0.99, 0.999];
const BLOWUP_GRID: [(usize, [f64; 3], [f64; 3]); 2] = [
    (2, [0.5, 1.0, 1.5], [5.0, 6.0, 8.0]),
    (3, [1.0, 1.5, 2.0], [4.0, 5.0, 6.0]),
];

fn collapse_ratio(d: &ChirpDatum) -> Result<f64> {
    let rep = collapse(d, &COLLAPSE_T, &default_z_grid())?;
    Ok(rep
        .sup_distance
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max))
}

fn blowup_suite(sink: &mut Sink) {
    let t_grid = t_grid_to_one(0.99, 0.9999, 8);
    for (n, sigmas, qs) in BLOWUP_GRID {
        for sigma in sigmas {
            let datum = match ChirpDatum::new(n, sigma) {
                Ok(d) => d,
                Err(e) => {
                    sink.at_most(format!("c6.datum.n{n}.s{sigma}"), Err(e), 0.0);
                    continue;
                }
            };
            sink.below(
                format!("c6.collapse.n{n}.s{sigma}"),
                collapse_ratio(&datum),
                1.0,
                0.0,
            );
            for q in qs {
                let fit = t_grid
                    .clone()
                    .and_then(|g| lq_annulus_growth(&datum, q, &g))
                    .map(|g| g.fit.fitted_exponent);
                sink.near(
                    format!("c6.annulus.n{n}.s{sigma}.q{q}"),
                    fit,
                    datum.predicted_exponent(q),
                    0.1,
                );
            }
        }
    }
}

const GATE_R: [f64; 5] = [2.1, 2.5, 3.0, 4.0, 8.0];
const GATE_SAMPLES: usize = 61;

fn permitted_count(n: usize, r: f64) -> Result<f64> {
    let table = gate_scan(n, Exponent::new(r)?, GATE_SAMPLES);
    if table.pairs.is_empty() {
        return Err(Error::Numerical(format!(
            "no scaling-compatible pairs for n={n} r={r}"
        )));
    }
    let permitted = table
        .pairs
        .iter()
        .filter(|v| v.verdict != Verdict::Forbidden)
        .count();
    Ok(permitted as f64 + if table.verdict == Verdict::Forbidden { 0.0 } else { 1.0 })
}

/// Classical admissible pairs (p, q) with 2/p + n/q = n/2, p ≥ 2.
fn classical_pairs(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    [2.0, 3.0, 4.0, 8.0, f64::INFINITY]
        .into_iter()
        .filter(|&p| !(n == 2 && p == 2.0))
        .map(|p| (p, nf / (nf / 2.0 - 2.0 / p)))
        .collect()
}

fn classical_rejections(n: usize) -> Result<f64> {
    let two = Exponent::new(2.0)?;
    let mut rejected = 0;
    for (p, q) in classical_pairs(n) {
        let v = strichartz_gate(n, Exponent::new(p)?, Exponent::new(q)?, two);
        if v.verdict != Verdict::Permitted {
            rejected += 1;
        }
    }
    Ok(rejected as f64)
}

fn gate_suite(sink: &mut Sink) {
    for n in [2usize, 3, 4] {
        for r in GATE_R {
            sink.at_most(format!("c7.forbidden.n{n}.r{r}"), permitted_count(n, r), 0.0);
        }
        sink.at_most(format!("c7.classical.n{n}"), classical_rejections(n), 0.0);
    }
    let endpoint = Exponent::new(2.0).map(|two| {
        let v = strichartz_gate(2, two, Exponent::Infinite, two);
        if v.verdict == Verdict::ExcludedEndpoint {
            0.0
        } else {
            1.0
        }
    });
    sink.at_most("c7.classical_endpoint.n2", endpoint, 0.0);
    for n in 2..=6usize {
        let bound = Exponent::new(2.0)
            .and_then(|r| necessary_p_bound(r, n))
            .map(|p| (p.value() - 2.0).abs());
        sink.at_most(format!("c7.p_bound.n{n}"), bound, 1e-12);
    }
}

const APPENDIX_DELTAS: [f64; 3] = [0.3, 0.5, 0.7];
const PSI_PROBES: [f64; 3] = [0.01, 0.05, 0.1];
const LR_DELTAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
const LR_GRID: [(usize, [f64; 5]); 2] = [
    (2, [1.5, 2.2, 3.0, 4.0, 6.0]),
    (3, [1.7, 1.9, 2.4, 3.5, 5.0]),
];

fn lr_mismatches(n: usize, rs: &[f64]) -> Result<f64> {
    let mut bad = 0;
    for delta in LR_DELTAS {
        let norms = phi_lr_norms(delta, n, rs)?;
        for (&r, v) in rs.iter().zip(&norms) {
            if v.is_finite() != lr_member_predicted(delta, n, r) {
                bad += 1;
            }
        }
    }
    Ok(bad as f64)
}

fn appendix_suite(sink: &mut Sink) {
    let phi_grid = envelope_grid(1e2, 1e5, 24);
    let psi_grid = geometric_grid(1e2, 1e5, 31);
    for n in [2usize, 3] {
        for delta in APPENDIX_DELTAS {
            sink.near(
                format!("c8.phi.n{n}.d{delta}"),
                phi_decay_fit(delta, n, &phi_grid).map(|f| f.fitted_exponent),
                phi_decay_exponent(delta, n),
                0.1,
            );
            for x in PSI_PROBES {
                sink.near(
                    format!("c8.psi.n{n}.d{delta}.x{x}"),
                    psi_time_fit(delta, n, x, &psi_grid).map(|f| f.fitted_exponent),
                    delta - 1.0,
                    0.1,
                );
            }
        }
    }
    for (n, rs) in LR_GRID {
        sink.at_most(format!("c8.lr_membership.n{n}"), lr_mismatches(n, &rs), 0.0);
    }
}
