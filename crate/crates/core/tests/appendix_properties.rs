use disperse_lab::appendix::{lpq_region, lpq_scan, necessary_p_bound, region_slack};
use disperse_lab::blowup::Exponent;
use proptest::prelude::*;

fn e(v: f64) -> Exponent {
    Exponent::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_bound_tends_to_two_at_r_two(n in 2usize..=8, k in 4i32..12) {
        let eps = 10f64.powi(-k);
        let b = necessary_p_bound(e(2.0 + eps), n).unwrap().value();
        prop_assert!((b - 2.0).abs() <= 10.0 * n as f64 * eps, "n={} r=2+{:e}: {}", n, eps, b);
        let at_two = necessary_p_bound(e(2.0), n).unwrap().value();
        prop_assert_eq!(at_two, 2.0);
    }

    #[test]
    fn region_is_monotone_in_p_and_delta(
        n in 2usize..=4,
        delta in 0.01f64..0.99,
        d_delta in 0.0f64..0.5,
        p in 1.0f64..50.0,
        dp in 0.0f64..20.0,
        q in 1.0f64..50.0,
    ) {
        let here = lpq_region(delta, n, e(p), e(q)).unwrap().member;
        if here {
            prop_assert!(lpq_region(delta, n, e(p + dp), e(q)).unwrap().member);
            let smaller = (delta - d_delta).max(0.005);
            prop_assert!(lpq_region(smaller, n, e(p), e(q)).unwrap().member);
        }
        prop_assert_eq!(here, region_slack(delta, n, e(p), e(q)) > 1.0);
    }
}

#[test]
fn empirical_scan_agrees_with_region() {
    let ps = [1.2, 1.6, 2.2, 3.2, 5.0, 8.0, 14.0, 30.0];
    let qs = [1.5, 1.8, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0];
    let scan = lpq_scan(0.5, 2, &ps, &qs, &[4.0, 8.0, 16.0, 32.0]).unwrap();
    assert_eq!(scan.cells.len(), 64);
    for c in &scan.cells {
        let slack = region_slack(0.5, 2, e(c.p), e(c.q));
        if !c.verdict.member {
            assert!(c.divergent, "forbidden cell p={} q={} looks finite: {:?}", c.p, c.q, c.norms);
        } else if slack >= 1.3 {
            assert!(!c.divergent, "interior cell p={} q={} flagged divergent", c.p, c.q);
        }
    }
}
