use disperse_lab::decay::{
    component_ym, geometric_grid, space_domination_constant, superposition_bound,
    time_decay_fit, time_domination_constant, DiscreteMeasure,
};
use disperse_lab::norms::norm_report;
use disperse_lab::propagator::{default_quad, evolve_radial_with, EvalPoint, RadialProfile};
use disperse_lab::quad::QuadOptions;
use disperse_lab::Complex64;
use proptest::prelude::*;

fn probe_points() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for &x in &[0.5, 1.0, 2.0, 5.0] {
        for &t in &[1.0, 10.0, 100.0, 1000.0] {
            pts.push((x, t));
        }
    }
    pts
}

#[test]
fn stronger_norm_gives_stronger_rate() {
    let cases = [
        (2usize, RadialProfile::bump(0.0, 2.0).unwrap()),
        (3, RadialProfile::bump(0.5, 2.0).unwrap()),
        (2, RadialProfile::power(3.5).unwrap()),
        (2, RadialProfile::power(1.5).unwrap()),
        (3, RadialProfile::power(4.5).unwrap()),
    ];
    for (n, p) in &cases {
        let report = norm_report(p, *n).unwrap();
        let m_min = report.ym.iter().position(|v| v.is_finite()).unwrap();
        let grid = geometric_grid(2.0, 2e4, 13);
        let fit = time_decay_fit(p, *n, m_min, &[0.05, 0.1], &grid).unwrap();
        let bound = (m_min as f64 - *n as f64) / 2.0 + 0.1;
        assert!(
            fit.fitted_exponent <= bound,
            "{} n={n}: exponent {} above {bound} (finite from Y{m_min})",
            p.label(),
            fit.fitted_exponent
        );
    }
}

fn tight_time_constant(p: &RadialProfile, n: usize, m: usize, pts: &[(f64, f64)], opts: QuadOptions) -> f64 {
    let norm = component_ym(p, n, m).unwrap();
    let e = (m as f64 - n as f64) / 2.0;
    pts.iter()
        .map(|&(x, t)| {
            let v = evolve_radial_with(p, EvalPoint::new(n, x, t).unwrap(), opts).unwrap().abs();
            v / (t.powf(e) * norm)
        })
        .fold(0.0, f64::max)
}

#[test]
fn constants_are_stable_under_tighter_quadrature() {
    let pts = probe_points();
    let base = default_quad();
    let tight = QuadOptions {
        abs_tol: base.abs_tol / 10.0,
        rel_tol: base.rel_tol / 10.0,
        max_intervals: base.max_intervals * 4,
    };
    let cases = [
        (2usize, RadialProfile::bump(0.0, 2.0).unwrap()),
        (3, RadialProfile::gaussian(1.0).unwrap()),
        (2, RadialProfile::power(3.5).unwrap()),
    ];
    for (n, p) in &cases {
        let c0 = time_domination_constant(p, *n, 0, &pts).unwrap();
        let c1 = tight_time_constant(p, *n, 0, &pts, tight);
        assert!((c0 - c1).abs() / c0 < 0.1, "{}: {c0} vs {c1}", p.label());
        assert!(c0 - tight_time_constant(p, *n, 0, &pts, base) == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn superposition_is_linear(
        w in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.0f64..6.0), 1..4),
        n in 2usize..=3,
    ) {
        let mut measure = DiscreteMeasure::default();
        for (j, &(re, im, omega)) in w.iter().enumerate() {
            let lo = 0.3 * j as f64;
            measure.push(
                Complex64::new(re, im),
                RadialProfile::bump(lo, lo + 1.5).unwrap().with_carrier(omega),
            );
        }
        let pts = [(0.5, 0.5), (2.0, 3.0), (8.0, 20.0)];
        let r = superposition_bound(&measure, n, 0, &pts).unwrap();
        let scale: f64 = w.iter().map(|&(a, b, _)| a.hypot(b)).sum::<f64>().max(1e-3);
        prop_assert!(r.max_linearity_err <= 1e-10 * scale, "err {:e}", r.max_linearity_err);
    }
}

#[test]
fn carrier_does_not_inflate_constants() {
    let pts = probe_points();
    for n in [2usize, 3] {
        let env = || RadialProfile::bump(0.5, 2.0).unwrap();
        let t0 = time_domination_constant(&env(), n, 0, &pts).unwrap();
        let s0 = space_domination_constant(&env(), n, &pts).unwrap();
        for omega in [0.0, 1.0, 5.0, 20.0] {
            let p = env().with_carrier(omega);
            let t = time_domination_constant(&p, n, 0, &pts).unwrap();
            let s = space_domination_constant(&p, n, &pts).unwrap();
            assert!(t <= 1.2 * t0, "n={n} omega={omega}: time constant {t} vs {t0}");
            assert!(s <= 1.2 * s0, "n={n} omega={omega}: space constant {s} vs {s0}");
        }
    }
}
