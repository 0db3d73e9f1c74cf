use disperse_lab::blowup::{gate_scan, scaling_p, strichartz_gate, ChirpDatum, Exponent, Verdict};
use proptest::prelude::*;

fn e(v: f64) -> Exponent {
    Exponent::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_scaling_pair_is_forbidden_above_two(
        n in 2usize..=6,
        r in 2.01f64..20.0,
        s in -3.0f64..3.0,
    ) {
        prop_assert_eq!(gate_scan(n, e(r), 9).verdict, Verdict::Forbidden);
        let q = e(r * (1.0 + 10f64.powf(s)));
        if let Some(p) = scaling_p(n, q, e(r)) {
            prop_assert_eq!(strichartz_gate(n, p, q, e(r)).verdict, Verdict::Forbidden);
        }
    }

    #[test]
    fn classical_pairs_are_permitted(n in 3usize..=6, u in 0.0f64..1.0) {
        // 1/q between (n-2)/2n and 1/2
        let nf = n as f64;
        let iq = (nf - 2.0) / (2.0 * nf) + u * (1.0 / nf);
        let q = e(1.0 / iq);
        let p = scaling_p(n, q, e(2.0)).unwrap();
        prop_assert_eq!(strichartz_gate(n, p, q, e(2.0)).verdict, Verdict::Permitted);
    }

    #[test]
    fn chirp_lies_in_lr_iff_sigma_exceeds_n_over_r(
        n in 2usize..=4,
        sigma_frac in 0.0f64..1.0,
        r in 1.0f64..12.0,
    ) {
        let nf = n as f64;
        let lo = (nf - 3.0) / 2.0;
        let sigma = lo + 0.01 + sigma_frac * (nf - lo - 0.02);
        prop_assume!((sigma - nf / r).abs() > 0.05);
        let finite = ChirpDatum::new(n, sigma).unwrap().lr_norm(e(r)).is_finite();
        prop_assert_eq!(finite, sigma > nf / r, "n={} sigma={} r={}", n, sigma, r);
    }
}

#[test]
fn chirp_is_bounded_exactly_for_nonnegative_sigma() {
    assert!(ChirpDatum::new(3, 0.5).unwrap().lr_norm(Exponent::Infinite).is_finite());
    assert!(!ChirpDatum::new(2, -0.3).unwrap().lr_norm(Exponent::Infinite).is_finite());
}
