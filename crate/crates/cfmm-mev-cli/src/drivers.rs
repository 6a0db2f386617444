//! Experiment drivers. Each returns its rows; writing them is left to the caller.

use cfmm_mev::cfmm::estimate_curvature;
use cfmm_mev::reorder::{cof_scaling_study, ScalingStudy};
use cfmm_mev::routing::{optimal_route, selfish_route, welfare_and_poa, Network, Slippage, Welfare};
use cfmm_mev::sandwich::{compute_pnl_bounds, execute_sandwich, PnlBounds};
use cfmm_mev::{ExchangeFunction, Trade};
use serde::Serialize;

use crate::error::Result;
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PigouRow {
    pub eta: f64,
    pub opt_out: f64,
    pub eq_out: f64,
    pub poa: f64,
    pub eq_frac_cfmm1: f64,
    pub opt_frac_cfmm1: f64,
    /// Attacker profit at the equilibrium split.
    pub pnl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraessRow {
    pub eta: f64,
    pub opt_out: f64,
    pub eq_out: f64,
    pub poa: f64,
    pub mid_frac_eq: f64,
    pub mid_frac_opt: f64,
    pub pnl: f64,
}

/// Outputs on the network with every attacked edge removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineRow {
    pub opt_out: f64,
    pub eq_out: f64,
}

/// One point of a slippage sweep; attacked flow is the share routed over
/// paths that contain an attacked edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub eta: f64,
    pub opt_out: f64,
    pub eq_out: f64,
    pub poa: f64,
    pub eq_attacked: f64,
    pub opt_attacked: f64,
    pub pnl: f64,
}

fn attacked_share(net: &Network, alpha: &[f64], total: f64) -> f64 {
    let edges = net.graph().edges();
    let on_attacked: f64 = net
        .paths()
        .iter()
        .zip(alpha)
        .filter(|(p, _)| p.iter().any(|&e| edges[e].attacked))
        .map(|(_, a)| a)
        .sum();
    on_attacked / total
}

pub fn sweep(net: &Network, total: f64, etas: &[f64]) -> Result<Vec<SweepPoint>> {
    etas.iter()
        .map(|&eta| {
            let Welfare { optimum, equilibrium, poa } = welfare_and_poa(net, total, &Slippage::Uniform(eta))?;
            Ok(SweepPoint {
                eta,
                opt_out: optimum.total,
                eq_out: equilibrium.total,
                poa,
                eq_attacked: attacked_share(net, &equilibrium.alpha, total),
                opt_attacked: attacked_share(net, &optimum.alpha, total),
                pnl: equilibrium.flow.attacker_pnl(),
            })
        })
        .collect()
}

pub fn run_pigou_sweep(s: &Scenario) -> Result<Vec<PigouRow>> {
    let points = sweep(&s.network()?, s.amount()?, &s.eta_grid()?)?;
    Ok(points
        .into_iter()
        .map(|p| PigouRow {
            eta: p.eta,
            opt_out: p.opt_out,
            eq_out: p.eq_out,
            poa: p.poa,
            eq_frac_cfmm1: p.eq_attacked,
            opt_frac_cfmm1: p.opt_attacked,
            pnl: p.pnl,
        })
        .collect())
}

pub fn run_braess_sweep(s: &Scenario) -> Result<(BaselineRow, Vec<BraessRow>)> {
    let total = s.amount()?;
    let outer = s.network_filtered(|e| !e.attacked)?;
    let baseline = BaselineRow {
        opt_out: optimal_route(&outer, total, None)?.total,
        eq_out: selfish_route(&outer, total, None)?.total,
    };
    let rows = sweep(&s.network()?, total, &s.eta_grid()?)?
        .into_iter()
        .map(|p| BraessRow {
            eta: p.eta,
            opt_out: p.opt_out,
            eq_out: p.eq_out,
            poa: p.poa,
            mid_frac_eq: p.eq_attacked,
            mid_frac_opt: p.opt_attacked,
            pnl: p.pnl,
        })
        .collect();
    Ok((baseline, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteRow {
    /// Tokens along the path, joined by `-`.
    pub path: String,
    pub opt_alpha: f64,
    pub eq_alpha: f64,
    /// Average price on used paths, entry price on unused ones.
    pub eq_price: f64,
}

/// Optimal and selfish splits at the single slippage `trade.eta`.
pub fn run_route(s: &Scenario) -> Result<(Welfare, Vec<RouteRow>)> {
    let net = s.network()?;
    let w = welfare_and_poa(&net, s.amount()?, &Slippage::Uniform(s.trade.eta))?;
    let tokens = net.graph().tokens();
    let edges = net.graph().edges();
    let rows = net
        .paths()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut names = vec![tokens[edges[p[0]].from].as_str()];
            names.extend(p.iter().map(|&e| tokens[edges[e].to].as_str()));
            RouteRow {
                path: names.join("-"),
                opt_alpha: w.optimum.alpha[i],
                eq_alpha: w.equilibrium.alpha[i],
                eq_price: w.equilibrium.prices[i],
            }
        })
        .collect();
    Ok((w, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRow {
    pub delta: f64,
    pub eta: f64,
    pub delta_sand: f64,
    pub delta_sand_prime: f64,
    pub pnl: f64,
    pub user_output: f64,
    pub reserves_in: f64,
    pub reserves_out: f64,
}

pub fn run_sandwich(s: &Scenario) -> Result<SandwichRow> {
    let trade = Trade::new(s.trade.amount, s.trade.eta)?;
    let r = execute_sandwich(&s.pool()?, &trade)?;
    Ok(SandwichRow {
        delta: trade.delta,
        eta: trade.eta,
        delta_sand: r.delta_sand,
        delta_sand_prime: r.delta_sand_prime,
        pnl: r.pnl,
        user_output: r.user_output,
        reserves_in: r.reserves_after.reserves_in,
        reserves_out: r.reserves_after.reserves_out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub delta: f64,
    pub eta: f64,
    pub ds: f64,
    pub ds_ub: f64,
    pub ds_lb: f64,
    pub dsp: f64,
    pub dsp_ub: f64,
    pub dsp_lb: f64,
    pub pnl: f64,
    pub pnl_ub: f64,
    pub pnl_lb: f64,
    /// Hypotheses that hold, then `ub=`, `lb=` and `pnl=` set to `ok`, `fail` or `skip`.
    pub flags: String,
}

/// Outcome of one family of comparisons across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CheckCount {
    pub checked: usize,
    pub violations: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BoundsSummary {
    pub cells: usize,
    pub upper: CheckCount,
    pub lower: CheckCount,
    pub pnl: CheckCount,
}

const BOUND_RTOL: f64 = 1e-9;

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUND_RTOL * a.abs().max(b.abs()).max(1e-300)
}

fn tally(count: &mut CheckCount, applies: bool, holds: bool) -> &'static str {
    if !applies {
        count.skipped += 1;
        "skip"
    } else {
        count.checked += 1;
        if holds {
            "ok"
        } else {
            count.violations += 1;
            "fail"
        }
    }
}

/// Simulated front-run, back-run and profit against every bound on a
/// `(delta, eta)` grid; comparisons whose hypotheses fail are skipped.
pub fn run_bounds_report(s: &Scenario) -> Result<(BoundsSummary, Vec<BoundsRow>)> {
    let pool = s.pool()?;
    let deltas = s.bound_deltas()?;
    let etas = s.eta_grid()?;
    let interval = s.bounds.interval.unwrap_or(deltas[deltas.len() - 1]);
    let curv = estimate_curvature(&pool, interval, s.bounds.grid_points)?;
    let g0 = pool.rate(0.0)?;
    let mut summary = BoundsSummary::default();
    let mut rows = Vec::with_capacity(deltas.len() * etas.len());
    for &delta in &deltas {
        for &eta in &etas {
            let trade = Trade::new(delta, eta)?;
            let sim = execute_sandwich(&pool, &trade)?;
            let b: PnlBounds = compute_pnl_bounds(&curv, g0, &trade)?;
            let (ds, dsp, pnl) = (sim.delta_sand, sim.delta_sand_prime, sim.pnl);
            let f = b.flags;
            let mut flags: Vec<String> = [
                ("slippage", f.slippage),
                ("liquidity", f.liquidity),
                ("price", f.price),
                ("covers", f.covers),
            ]
            .iter()
            .filter(|(_, on)| *on)
            .map(|(name, _)| name.to_string())
            .collect();
            let ub = tally(&mut summary.upper, f.upper_valid, le(ds, b.ds_ub) && le(dsp, b.dsp_ub));
            let lb = tally(&mut summary.lower, f.lower_valid, le(b.ds_lb, ds) && le(b.dsp_lb, dsp));
            let pn = tally(&mut summary.pnl, f.pnl_valid, le(b.pnl_lb, pnl) && le(pnl, b.pnl_ub));
            flags.extend([format!("ub={ub}"), format!("lb={lb}"), format!("pnl={pn}")]);
            summary.cells += 1;
            rows.push(BoundsRow {
                delta,
                eta,
                ds,
                ds_ub: b.ds_ub,
                ds_lb: b.ds_lb,
                dsp,
                dsp_ub: b.dsp_ub,
                dsp_lb: b.dsp_lb,
                pnl,
                pnl_ub: b.pnl_ub,
                pnl_lb: b.pnl_lb,
                flags: flags.join(";"),
            });
        }
    }
    Ok((summary, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CofRow {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub numerator: f64,
    pub denominator: f64,
    pub cof: f64,
}

/// One sampled ordering of one block size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CofSampleRow {
    pub n: usize,
    pub sample: usize,
    pub max_diff: f64,
    pub mean_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    /// `log` regresses on `ln n`, `linear` on `n`.
    pub model: &'static str,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub struct ReorderOutput {
    pub study: ScalingStudy,
    pub rows: Vec<CofRow>,
    pub fits: Vec<FitRow>,
    pub samples: Vec<CofSampleRow>,
}

pub fn run_reorder_study(s: &Scenario) -> Result<ReorderOutput> {
    let (k, seed) = (s.samples()?, s.seed()?);
    let study = cof_scaling_study(&s.pool_template()?, &s.distribution()?, &s.n_values()?, k, seed)?;
    let rows = study
        .points
        .iter()
        .map(|p| CofRow { n: p.n, k, seed, numerator: p.numerator, denominator: p.denominator, cof: p.cof })
        .collect();
    let fits = [("log", study.log_fit), ("linear", study.linear_fit)]
        .into_iter()
        .map(|(model, f)| FitRow { model, slope: f.slope, intercept: f.intercept, r2: f.r2 })
        .collect();
    let samples = study
        .points
        .iter()
        .flat_map(|p| {
            p.samples.iter().enumerate().map(|(i, x)| CofSampleRow {
                n: p.n,
                sample: i,
                max_diff: x.max_diff,
                mean_diff: x.mean_diff,
            })
        })
        .collect();
    Ok(ReorderOutput { study, rows, fits, samples })
}
