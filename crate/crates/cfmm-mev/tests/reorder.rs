use cfmm_mev::cfmm::estimate_curvature;
use cfmm_mev::reorder::{
    check_sequence_bounds, cof_estimate, cof_estimate_without_replacement, cof_exact,
    cof_scaling_study, pnl_sequence_bounds, simulate_sequence, Assumption, Magnitude,
    PnlBoundConstants, PoolTemplate, TradeDistribution,
};
use cfmm_mev::sandwich::{compute_pnl_bounds, execute_sandwich};
use cfmm_mev::{Cfmm, CfmmKind, Error, Trade};
use proptest::prelude::*;

/// Constant-product buys sandwiched one after another on raw reserves, with
/// the front-run from the quadratic `x^2 + (d + 2r) x - c = 0`.
fn cp_buy_sequence(r0: f64, rp0: f64, trades: &[(f64, f64)]) -> Vec<f64> {
    let (mut r, mut rp) = (r0, rp0);
    let mut out = Vec::new();
    for &(d, eta) in trades {
        let k = r * rp;
        let c = (r * r + r * d) * eta / (1.0 - eta);
        let b = d + 2.0 * r;
        let x = (-b + (b * b + 4.0 * c).sqrt()) / 2.0;
        let bought = rp - k / (r + x);
        let user = (rp - bought) - k / (r + x + d);
        let (r2, rp2) = (r + x + d, rp - bought - user);
        let back = r2 - k / (rp2 + bought);
        out.push(back - x);
        r = r2 - back;
        rp = rp2 + bought;
    }
    out
}

fn trades(spec: &[(f64, f64)]) -> Vec<Trade> {
    spec.iter().map(|&(d, e)| Trade::new(d, e).unwrap()).collect()
}

#[test]
fn single_trade_is_one_sandwich() {
    let pool = Cfmm::constant_product(5.0, 7.0).unwrap();
    let t = Trade::new(0.7, 0.08).unwrap();
    let seq = simulate_sequence(&pool, &[t]).unwrap();
    let one = execute_sandwich(&pool, &t).unwrap();
    assert_eq!(seq.results[0], one);
    assert_eq!(seq.final_pool, one.reserves_after);
    assert_eq!(seq.pnl, vec![one.pnl]);
}

#[test]
fn matches_reserve_level_oracle() {
    let spec = [(1.0, 0.05), (0.4, 0.2), (2.5, 0.01), (0.9, 0.1)];
    let pool = Cfmm::constant_product(20.0, 30.0).unwrap();
    let seq = simulate_sequence(&pool, &trades(&spec)).unwrap();
    let oracle = cp_buy_sequence(20.0, 30.0, &spec);
    for (a, b) in seq.pnl.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10 * b, "{a} vs {b}");
    }
}

#[test]
fn repeated_trade_on_deep_pool_is_near_stationary() {
    let pool = Cfmm::constant_product(1e5, 1e5).unwrap();
    let seq = simulate_sequence(&pool, &trades(&[(1.0, 0.05), (1.0, 0.05)])).unwrap();
    assert!((seq.pnl[1] - seq.pnl[0]).abs() < 0.01 * seq.pnl[0]);
}

#[test]
fn zero_slippage_means_no_profit() {
    let pool = Cfmm::constant_product(10.0, 10.0).unwrap();
    let ts = trades(&[(1.0, 0.0), (-0.5, 0.0), (2.0, 0.0)]);
    let seq = simulate_sequence(&pool, &ts).unwrap();
    assert!(seq.pnl.iter().all(|p| *p == 0.0));
    for (xi, t) in seq.net_inputs.iter().zip(&ts) {
        assert_eq!(*xi, t.delta);
    }
}

#[test]
fn errors_carry_the_trade_index() {
    let pool = Cfmm::constant_product(1.0, 1.0).unwrap();
    let ts = trades(&[(0.1, 0.1), (-5.0, 0.1)]);
    let err = simulate_sequence(&pool, &ts).unwrap_err();
    assert!(matches!(err, Error::AtTrade { index: 1, .. }), "{err:?}");
}

#[test]
fn single_and_identical_trades_are_degenerate() {
    let pool = Cfmm::constant_product(100.0, 100.0).unwrap();
    let one = trades(&[(1.0, 0.1)]);
    assert_eq!(cof_estimate(&pool, &one, 10, 1).unwrap_err(), Error::DegenerateDenominator);
    assert_eq!(cof_exact(&pool, &one).unwrap_err(), Error::DegenerateDenominator);
    let same = trades(&[(1.0, 0.1); 5]);
    assert_eq!(cof_estimate(&pool, &same, 50, 1).unwrap_err(), Error::DegenerateDenominator);
    assert_eq!(cof_exact(&pool, &same).unwrap_err(), Error::DegenerateDenominator);
    assert!(cof_estimate(&pool, &[], 10, 1).is_err());
    assert!(cof_estimate(&pool, &trades(&[(1.0, 0.1), (2.0, 0.1)]), 0, 1).is_err());
}

#[test]
fn exact_and_sampled_agree_when_sampling_everything() {
    let pool = Cfmm::constant_product(30.0, 30.0).unwrap();
    for n in 2..=6usize {
        let spec: Vec<(f64, f64)> = (0..n)
            .map(|i| (if i % 2 == 0 { 1.0 } else { -0.6 } * (1.0 + 0.3 * i as f64), 0.02 + 0.01 * i as f64))
            .collect();
        let ts = trades(&spec);
        let exact = cof_exact(&pool, &ts).unwrap();
        let total: usize = (1..=n).product();
        assert_eq!(exact.n_permutations, total);
        let sampled = cof_estimate_without_replacement(&pool, &ts, total, 9).unwrap();
        assert!((exact.cof - sampled.cof).abs() <= 1e-12 * exact.cof, "n={n}");
        assert!(exact.cof >= 1.0);
        assert!(cof_estimate_without_replacement(&pool, &ts, total + 1, 9).is_err());
    }
}

#[test]
fn estimates_are_deterministic() {
    let pool = Cfmm::constant_product(50.0, 80.0).unwrap();
    let ts = trades(&[(1.0, 0.05), (-2.0, 0.1), (0.5, 0.02), (3.0, 0.07)]);
    let a = cof_estimate(&pool, &ts, 200, 42).unwrap();
    let b = cof_estimate(&pool, &ts, 200, 42).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.cof.to_bits(), b.cof.to_bits());
    let c = cof_estimate(&pool, &ts, 200, 43).unwrap();
    assert_ne!(a.numerator, c.numerator);
    assert_eq!((a.seed, a.n_trades, a.n_permutations), (42, 4, 200));
}

#[test]
fn scaling_study_is_reproducible() {
    let template = PoolTemplate { kind: CfmmKind::ConstantProduct, depth: 100.0, price: 1.0 };
    let dist = TradeDistribution {
        magnitude: Magnitude::Uniform { lo: 0.5, hi: 1.5 },
        alternating: true,
        eta: 0.05,
    };
    let a = cof_scaling_study(&template, &dist, &[2, 4, 8], 50, 3).unwrap();
    let b = cof_scaling_study(&template, &dist, &[2, 4, 8], 50, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.points.iter().all(|p| p.cof >= 1.0));
}

#[test]
fn sequence_bounds_follow_their_recursion() {
    let pool = Cfmm::constant_product(1e3, 1e3).unwrap();
    let curv = estimate_curvature(&pool, 5.0, 100).unwrap();
    let rep = Trade::new(1.0, 0.05).unwrap();
    let b = compute_pnl_bounds(&curv, pool.spot_rate(), &rep).unwrap();
    let k = PnlBoundConstants::from_bounds(&curv, pool.spot_rate(), &b).unwrap();
    let ts = trades(&[(1.0, 0.05), (-1.0, 0.05), (2.0, 0.05)]);
    let bounds = pnl_sequence_bounds(&k, &ts).unwrap();
    let p = |d: f64| (k.a - 1.0) * d + k.b;
    assert!((bounds[0].upper - (k.a + k.b)).abs() < 1e-12 * bounds[0].upper.abs().max(1.0));
    let u2 = -k.a + k.b + k.c * p(1.0);
    assert!((bounds[1].upper - u2).abs() < 1e-12 * u2.abs().max(1.0));
    let u3 = 2.0 * k.a + k.b + k.c * (p(1.0) * k.d + p(-1.0));
    assert!((bounds[2].upper - u3).abs() < 1e-12 * u3.abs().max(1.0));
    assert!((bounds[1].lower - (-1.0 + k.e * k.e)).abs() < 1e-15);
    assert_eq!(bounds.iter().map(|s| s.lower_applies).collect::<Vec<_>>(), [false, true, false]);

    let report = check_sequence_bounds(&k, &pool, &ts, 0.5, true).unwrap();
    assert_eq!(report.pnl.len(), 3);
    if !k.valid() {
        assert_eq!(report.assumption_violated, Some(Assumption::Constants));
    }
    let report = check_sequence_bounds(&k, &pool, &ts, 0.0, true).unwrap();
    assert!(report.assumption_violated.is_some());
    assert!(!report.holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn drifts_accumulate_net_inputs(
        r in 10.0f64..1e4,
        spec in prop::collection::vec((0.01f64..1.0, any::<bool>(), 0.0f64..0.5), 1..8),
    ) {
        let ts: Vec<Trade> = spec.iter()
            .map(|&(m, buy, eta)| Trade::new(if buy { m } else { -m } * r * 0.01, eta).unwrap())
            .collect();
        let pool = Cfmm::constant_product(r, 2.0 * r).unwrap();
        let seq = simulate_sequence(&pool, &ts).unwrap();
        let mut u = 0.0;
        for (i, t) in ts.iter().enumerate() {
            prop_assert!((seq.net_inputs[i] - (t.delta - seq.pnl[i])).abs() <= 1e-12 * r);
            u += seq.net_inputs[i];
            prop_assert!((seq.drifts[i] - u).abs() <= 1e-12 * r);
            prop_assert!(seq.pnl[i] >= -1e-12 * r);
        }
        prop_assert!((seq.final_pool.reserves_in - (r + u)).abs() <= 1e-9 * r);
        prop_assert!((seq.total_pnl() - seq.pnl.iter().sum::<f64>()).abs() == 0.0);
    }

    #[test]
    fn cof_at_least_one(
        spec in prop::collection::vec((0.1f64..2.0, any::<bool>(), 0.01f64..0.3), 2..6),
        seed in any::<u64>(),
    ) {
        let ts: Vec<Trade> = spec.iter()
            .map(|&(m, buy, eta)| Trade::new(if buy { m } else { -m }, eta).unwrap())
            .collect();
        let pool = Cfmm::constant_product(50.0, 50.0).unwrap();
        match cof_estimate(&pool, &ts, 20, seed) {
            Ok(est) => prop_assert!(est.cof >= 1.0 - 1e-12),
            Err(e) => prop_assert_eq!(e, Error::DegenerateDenominator),
        }
    }
}
