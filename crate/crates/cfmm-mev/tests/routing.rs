use cfmm_mev::routing::{
    braess, optimal_route, path_sandwich, path_sandwich_bounds, pigou, poa_smoothness_bound,
    selfish_route, welfare_and_poa, Network, Slippage, TokenGraph,
};
use cfmm_mev::{Cfmm, CurvatureBounds, EdgeFn, Error, ExchangeFunction, PowerEdge};

/// Closed forms for the two-pool network with a sandwiched `2x / (1 + x)` pool
/// next to a rate-one constant-sum pool, one unit routed.
struct PigouOracle {
    opt_alpha: f64,
    opt_out: f64,
    eq_alpha: f64,
    eq_out: f64,
}

fn pigou_oracle(eta: f64) -> PigouOracle {
    let s = (2.0 * (1.0 - eta)).sqrt();
    let opt_alpha = (s - 1.0).max(0.0);
    let opt_out = (1.0 - eta) * 2.0 * opt_alpha / (1.0 + opt_alpha) + (1.0 - opt_alpha);
    let eq_alpha = (1.0 - 2.0 * eta).max(0.0);
    PigouOracle { opt_alpha, opt_out, eq_alpha, eq_out: 1.0 }
}

#[test]
fn pigou_without_attack_matches_closed_form() {
    let net = pigou().unwrap();
    let opt = optimal_route(&net, 1.0, None).unwrap();
    assert!((opt.alpha[0] - (2f64.sqrt() - 1.0)).abs() < 1e-6, "{:?}", opt.alpha);
    assert!((opt.total - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-9);
    assert!(opt.kkt.satisfied, "{:?}", opt.kkt);
    let eq = selfish_route(&net, 1.0, None).unwrap();
    assert!((eq.alpha[0] - 1.0).abs() < 1e-9, "{:?}", eq.alpha);
    assert!((eq.total - 1.0).abs() < 1e-9);
}

#[test]
fn pigou_under_attack_matches_closed_form() {
    let net = pigou().unwrap();
    for eta in [1e-4, 0.01, 0.1, 0.25, 0.4, 0.49, 0.5, 0.6, 0.9] {
        let o = pigou_oracle(eta);
        let w = welfare_and_poa(&net, 1.0, &Slippage::Uniform(eta)).unwrap();
        assert!((w.optimum.alpha[0] - o.opt_alpha).abs() < 1e-6, "eta {eta}: {:?}", w.optimum.alpha);
        assert!((w.optimum.total - o.opt_out).abs() < 1e-9, "eta {eta}");
        assert!((w.equilibrium.alpha[0] - o.eq_alpha).abs() < 1e-8, "eta {eta}: {:?}", w.equilibrium.alpha);
        assert!((w.equilibrium.total - o.eq_out).abs() < 1e-8, "eta {eta}");
        assert!((w.poa - o.opt_out / o.eq_out).abs() < 1e-8);
        assert!(w.optimum.kkt.satisfied, "eta {eta}: {:?}", w.optimum.kkt);
    }
}

#[test]
fn braess_paradox_and_recovery() {
    let full = braess(true).unwrap();
    let outer = braess(false).unwrap();
    assert_eq!(full.paths().len(), 3);
    let base = selfish_route(&outer, 1.0, None).unwrap();
    assert!((base.total - 2f64.sqrt()).abs() < 1e-9);

    let eq0 = selfish_route(&full, 1.0, None).unwrap();
    assert!((eq0.total - 1.0).abs() < 1e-8, "{:?}", eq0.alpha);
    let w = welfare_and_poa(&full, 1.0, &Slippage::Uniform(0.9)).unwrap();
    assert!((w.equilibrium.total - 2f64.sqrt()).abs() < 1e-8, "{:?}", w.equilibrium.alpha);
    assert!((w.poa - 1.0).abs() < 1e-6);
    for eta in [0.01, 0.1, 0.3, 0.5, 0.7] {
        let w = welfare_and_poa(&full, 1.0, &Slippage::Uniform(eta)).unwrap();
        assert!(w.poa >= 1.0 - 1e-9, "eta {eta}: {}", w.poa);
    }
}

#[test]
fn single_edge_path_sandwich_matches_pool() {
    let pool = Cfmm::constant_product(1.0, 2.0).unwrap();
    let edges = [EdgeFn::Pool(pool)];
    let ps = path_sandwich(&edges, &[0.3], 0.2).unwrap();
    let x = cfmm_mev::sandwich::optimal_sandwich(&pool, &cfmm_mev::Trade::new(0.3, 0.2).unwrap()).unwrap();
    assert_eq!(ps.aggregate, x);
    assert!((ps.output - 0.8 * pool.output(0.3).unwrap()).abs() < 1e-12);
}

#[test]
fn chain_slippage_composes() {
    let edges = [
        EdgeFn::Pool(Cfmm::constant_product(2.0, 3.0).unwrap()),
        EdgeFn::Power(PowerEdge::sqrt()),
        EdgeFn::Pool(Cfmm::constant_product(5.0, 1.0).unwrap()),
    ];
    let mut inputs = vec![0.7];
    for e in &edges[..2] {
        let last = *inputs.last().unwrap();
        inputs.push(e.output(last).unwrap());
    }
    let ps = path_sandwich(&edges, &inputs, 0.1).unwrap();
    assert!(ps.sandwichable);
    assert!((ps.output - 0.9 * ps.nominal_output).abs() < 1e-10 * ps.nominal_output);
    let kept: f64 = ps.edge_slippage.iter().map(|s| 1.0 - s).product();
    assert!((kept - 0.9).abs() > 0.0);
    for (i, x) in ps.edge_sandwich.iter().enumerate() {
        let x = x.expect("every edge is strictly concave");
        let d = inputs[i];
        let g = edges[i].output(d).unwrap();
        let lhs = edges[i].output(d + x).unwrap() - edges[i].output(x).unwrap();
        assert!((lhs - (1.0 - ps.edge_slippage[i]) * g).abs() < 1e-10 * g, "edge {i}");
    }
}

fn two_pools(r1: (f64, f64), r2: (f64, f64)) -> Network {
    let mut g = TokenGraph::new();
    g.add_edge("A", "B", Cfmm::constant_product(r1.0, r1.1).unwrap(), true).unwrap();
    g.add_edge("A", "B", Cfmm::constant_product(r2.0, r2.1).unwrap(), true).unwrap();
    Network::new(g, "A", "B").unwrap()
}

#[test]
fn two_parallel_pools_match_dense_grid() {
    let (r1, r2) = ((1.0, 3.0), (2.0, 4.0));
    let net = two_pools(r1, r2);
    let eta = 0.1;
    let out = |a: f64, r: (f64, f64)| (1.0 - eta) * r.1 * a / (r.0 + a);
    let n = 10_000;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let best = grid.iter().map(|&a| out(a, r1) + out(1.0 - a, r2)).fold(f64::MIN, f64::max);
    // Average prices r'/(r + a) equalise where the price gap changes sign.
    let gap = |a: f64| r1.1 / (r1.0 + a) - r2.1 / (r2.0 + 1.0 - a);
    let cross = grid.windows(2).find(|w| gap(w[0]) * gap(w[1]) <= 0.0).unwrap()[0];

    let w = welfare_and_poa(&net, 1.0, &Slippage::Uniform(eta)).unwrap();
    assert!(w.optimum.total >= best - 1e-12 && w.optimum.total - best < 1e-7);
    assert!((w.equilibrium.alpha[0] - cross).abs() <= 1.0 / n as f64, "{:?}", w.equilibrium.alpha);
    assert!((w.equilibrium.prices[0] - w.equilibrium.prices[1]).abs() < 1e-8);
    assert!(w.poa >= 1.0 - 1e-12);
}

#[test]
fn single_path_has_no_anarchy() {
    let mut g = TokenGraph::new();
    g.add_edge("A", "B", Cfmm::constant_product(3.0, 2.0).unwrap(), true).unwrap();
    let net = Network::new(g, "A", "B").unwrap();
    for eta in [0.0, 0.2, 0.7] {
        let w = welfare_and_poa(&net, 0.5, &Slippage::Uniform(eta)).unwrap();
        assert_eq!(w.optimum.alpha, vec![0.5]);
        assert_eq!(w.equilibrium.alpha, vec![0.5]);
        assert!((w.poa - 1.0).abs() < 1e-12);
    }
}

fn constants(mu: f64, kappa: f64) -> CurvatureBounds {
    CurvatureBounds { alpha: 1.0, beta: 1.0, mu, kappa, trade_interval: 1.0, grid_points: 2 }
}

#[test]
fn smoothness_bound_reference_values() {
    let b = poa_smoothness_bound(&constants(1.0, 0.9), 0.2, 0.1, 1).unwrap();
    let lambda = (0.9 + 0.09 - 0.2) / (1.0 + 0.2 - 0.09);
    assert!((b.lambda - lambda).abs() < 1e-15);
    assert_eq!(b.nu, b.lambda);
    assert!((b.bound - (1.0 - lambda) / lambda).abs() < 1e-14);
    assert!(b.vacuous);

    let b = poa_smoothness_bound(&constants(1.0, 0.3), 0.1, 0.1, 2).unwrap();
    let lambda = (0.3 + 0.3 * 0.01 - 0.01) / (1.0 + 0.01 - 0.3 * 0.01);
    assert!((b.lambda - lambda).abs() < 1e-15);
    assert!(!b.vacuous);

    assert_eq!(
        poa_smoothness_bound(&constants(1.0, 0.5), 0.9, 0.0, 1),
        Err(Error::DegenerateConstants)
    );
    assert!(poa_smoothness_bound(&constants(1.0, 0.5), 0.1, 0.1, 0).is_err());
}

#[test]
fn path_bounds_use_composite_constants() {
    let c = constants(1.0, 0.5);
    let one = path_sandwich_bounds(&c, 1.0, 1, 0.6, 0.5).unwrap();
    assert!((one.upper - (0.6 / 0.5 - 1.0) * 0.5).abs() < 1e-15);
    assert!(one.upper_valid && one.lower_analytic);
    let two = path_sandwich_bounds(&c, 1.0, 2, 0.8, 0.5).unwrap();
    assert!((two.upper - (0.8 / 0.75 - 1.0) * 0.5).abs() < 1e-15);
    assert!((two.f * two.f - two.upper / 0.5).abs() < 1e-15);
    assert!(two.upper_valid && !two.lower_analytic);
    assert_eq!(two.lower, 0.0);
    let none = path_sandwich_bounds(&c, 1.0, 3, 0.0, 0.5).unwrap();
    assert_eq!((none.upper, none.lower, none.f, none.g), (0.0, 0.0, 0.0, 0.0));
}
