use cfmm_mev::cfmm::{estimate_curvature, estimate_curvature_two_sided};
use cfmm_mev::{Cfmm, ExchangeFunction, PowerEdge};
use proptest::prelude::*;

/// Plain bisection on `G(x) = out`, independent of the closed-form inverses.
fn bisect_inverse(f: &impl ExchangeFunction, out: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while f.output(hi).unwrap() < out {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f.output(mid).unwrap() < out {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn reference_values() {
    let p = Cfmm::constant_product(1.0, 2.0).unwrap();
    assert_eq!(p.output(0.0).unwrap(), 0.0);
    assert!((p.rate(2f64.sqrt() - 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((p.inverse(0.9).unwrap() - (2.0 / 1.1 - 1.0)).abs() < 1e-15);
    assert_eq!(p.inverse(0.0).unwrap(), 0.0);
    let q = p.apply_trade(0.07233).unwrap();
    assert!((q.reserves_in - 1.07233).abs() < 1e-12);
    assert!((q.reserves_out - 1.86510).abs() < 1e-5);
    assert_eq!(p.apply_trade(0.0).unwrap(), p);
    let s = Cfmm::constant_sum(1.0, 5.0, 5.0).unwrap();
    assert_eq!(s.output(0.5).unwrap(), 0.5);
    assert_eq!(s.rate(3.0).unwrap(), 1.0);
}

#[test]
fn weighted_product_inverse_matches_bisection() {
    for (w, r, rp) in [(0.2, 3.0, 5.0), (0.5, 1.0, 2.0), (0.8, 10.0, 1.0)] {
        let p = Cfmm::weighted_product(w, r, rp).unwrap();
        for frac in [1e-6, 0.01, 0.3, 0.9] {
            let out = frac * rp;
            let exact = p.inverse(out).unwrap();
            let oracle = bisect_inverse(&p, out);
            assert!((exact - oracle).abs() <= 1e-12 * oracle.max(1.0), "w={w} out={out}");
        }
    }
}

#[test]
fn weighted_product_preserves_invariant() {
    let p = Cfmm::weighted_product(0.3, 4.0, 9.0).unwrap();
    let k = p.invariant();
    for d in [-3.0, -0.5, 0.1, 7.0, 1e3] {
        let q = p.apply_trade(d).unwrap();
        assert!((q.invariant() - k).abs() <= 1e-12 * k, "delta {d}");
    }
}

#[test]
fn power_edge_curvature_is_exact_for_linear() {
    let e = PowerEdge::new(2.5, 1.0).unwrap();
    let c = estimate_curvature(&e, 3.0, 16).unwrap();
    assert_eq!((c.mu, c.kappa, c.alpha, c.beta), (2.5, 2.5, 0.0, 0.0));
}

#[test]
fn two_sided_fails_beyond_reserves() {
    let p = Cfmm::constant_product(1.0, 1.0).unwrap();
    assert!(estimate_curvature_two_sided(&p, 1.0, 16).is_err());
    assert!(estimate_curvature_two_sided(&p, 0.5, 16).is_ok());
}

fn pool() -> impl Strategy<Value = Cfmm> {
    let r = 1e-2f64..1e4;
    prop_oneof![
        (r.clone(), r.clone()).prop_map(|(a, b)| Cfmm::constant_product(a, b).unwrap()),
        (0.05f64..0.95, r.clone(), r).prop_map(|(w, a, b)| Cfmm::weighted_product(w, a, b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn constant_product_invariant(r in 1e-3f64..1e6, rp in 1e-3f64..1e6, frac in -0.99f64..100.0) {
        let p = Cfmm::constant_product(r, rp).unwrap();
        let q = p.apply_trade(frac * r).unwrap();
        prop_assert!((q.invariant() - p.invariant()).abs() <= 1e-12 * p.invariant());
    }
}

proptest! {
    #[test]
    fn chords_decrease(p in pool(), a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let mut x = [a, b, c].map(|v| v * p.reserves_in * 3.0);
        x.sort_by(f64::total_cmp);
        prop_assume!(x[1] - x[0] > 1e-9 * p.reserves_in && x[2] - x[1] > 1e-9 * p.reserves_in);
        let g = |v: f64| p.output(v).unwrap();
        let left = (g(x[1]) - g(x[0])) / (x[1] - x[0]);
        let right = (g(x[2]) - g(x[1])) / (x[2] - x[1]);
        prop_assert!(left >= right * (1.0 - 1e-9));
    }

    #[test]
    fn rate_matches_finite_difference(p in pool(), e in -4.0f64..2.0) {
        let d = 10f64.powf(e) * p.reserves_in;
        let g = p.rate(d).unwrap();
        // Past saturation the output is flat to machine precision.
        prop_assume!(g * d > 1e-3 * p.output(d).unwrap());
        let h = 1e-5 * d;
        let fd = (p.output(d + h).unwrap() - p.output(d - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - g).abs() <= 1e-6 * g.abs(), "fd {} vs {}", fd, g);
        let h2 = 1e-4 * d;
        let fd2 = (p.rate(d + h2).unwrap() - p.rate(d - h2).unwrap()) / (2.0 * h2);
        let s = p.rate_slope(d).unwrap();
        prop_assert!((fd2 - s).abs() <= 1e-5 * s.abs());
    }

    #[test]
    fn curvature_sandwiches_output(p in pool(), m in 0.01f64..5.0) {
        let m = m * p.reserves_in;
        let c = estimate_curvature(&p, m, 64).unwrap();
        prop_assert!(0.0 <= c.beta && c.beta <= c.alpha);
        prop_assert!(0.0 < c.kappa && c.kappa < c.mu);
        for j in 1..=64 {
            let d = m * j as f64 / 64.0;
            let g = p.output(d).unwrap();
            prop_assert!(c.kappa * d <= g * (1.0 + 1e-10) && g <= c.mu * d * (1.0 + 1e-10));
            let drop = p.rate(0.0).unwrap() - p.rate(d).unwrap();
            prop_assert!(c.beta * d <= drop * (1.0 + 1e-10) + 1e-300);
            prop_assert!(drop <= c.alpha * d * (1.0 + 1e-10));
        }
    }

    #[test]
    fn inverse_round_trip(p in pool(), frac in -0.9f64..50.0) {
        let d = frac * p.reserves_in;
        let out = p.output(d).unwrap();
        prop_assume!(out <= 0.99 * p.reserves_out);
        let back = p.inverse(out).unwrap();
        prop_assert!((back - d).abs() <= 1e-10 * (1.0 + d.abs()), "{} vs {}", back, d);
    }
}
