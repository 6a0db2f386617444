//! Locality: whether splitting an order flow into separate trades yields at
//! least as much attacker profit as bundling neighbouring trades.

use alloc::vec::Vec;

use super::{execute_sandwich, PnlBounds, Trade};
use crate::cfmm::{Cfmm, CurvatureBounds};
use crate::error::{Error, Result};
use crate::math::powi;

/// Hard cap on brute-force partition enumeration (`2^(n-1)` partitions).
pub const MAX_BRUTEFORCE_TRADES: usize = 12;

const TOL: f64 = 1e-12;

/// Profit of sandwiching `trades` one at a time on evolving reserves.
fn sequential(pool: &Cfmm, trades: &[Trade]) -> Result<(Vec<f64>, Vec<Cfmm>)> {
    let mut state = *pool;
    let mut pnl = Vec::with_capacity(trades.len());
    let mut states = Vec::with_capacity(trades.len());
    for (i, t) in trades.iter().enumerate() {
        states.push(state);
        let s = execute_sandwich(&state, t).map_err(|e| Error::at(i, e))?;
        state = s.reserves_after;
        pnl.push(s.pnl);
    }
    Ok((pnl, states))
}

/// Sandwiches a bundle as a single trade of the summed size at the tightest
/// slippage limit in the bundle. Returns the profit and the new pool.
fn bundle(pool: &Cfmm, trades: &[Trade]) -> Result<(f64, Cfmm)> {
    let delta: f64 = trades.iter().map(|t| t.delta).sum();
    if delta == 0.0 {
        return Ok((0.0, *pool));
    }
    let eta = trades.iter().map(|t| t.eta).fold(f64::INFINITY, f64::min);
    let s = execute_sandwich(pool, &Trade { delta, eta })?;
    Ok((s.pnl, s.reserves_after))
}

/// Worst contiguous bundling found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityReport {
    pub local: bool,
    /// Sum of individually sandwiched profits.
    pub individual: f64,
    /// Largest bundled total minus `individual`.
    pub worst_excess: f64,
    /// Bit `i` set means a cut between trades `i` and `i + 1`.
    pub worst_partition: u32,
}

/// Compares the individual profit against every contiguous partition of
/// `trades` into bundles.
pub fn strong_locality_report(pool: &Cfmm, trades: &[Trade], max_n: usize) -> Result<LocalityReport> {
    let n = trades.len();
    let cap = max_n.min(MAX_BRUTEFORCE_TRADES);
    if n > cap || max_n > MAX_BRUTEFORCE_TRADES {
        return Err(Error::TooManyTrades { n, max: cap });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty trade sequence"));
    }
    let individual: f64 = sequential(pool, trades)?.0.iter().sum();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_partition = 0;
    for cuts in 0u32..(1u32 << (n - 1)) {
        let mut state = *pool;
        let mut total = 0.0;
        let mut start = 0;
        for end in 1..=n {
            if end == n || cuts & (1 << (end - 1)) != 0 {
                let (p, next) = bundle(&state, &trades[start..end])?;
                total += p;
                state = next;
                start = end;
            }
        }
        let excess = total - individual;
        if excess > worst_excess {
            worst_excess = excess;
            worst_partition = cuts;
        }
    }
    let local = worst_excess <= TOL * individual.abs().max(1.0);
    Ok(LocalityReport { local, individual, worst_excess, worst_partition })
}

/// Whether no contiguous bundling of `trades` beats sandwiching them one at a time.
pub fn check_strong_locality_bruteforce(pool: &Cfmm, trades: &[Trade], max_n: usize) -> Result<bool> {
    strong_locality_report(pool, trades, max_n).map(|r| r.local)
}

/// For each adjacent pair, whether bundling the pair at the reserves it
/// meets in the sequence earns no more than sandwiching both trades.
pub fn pairwise_locality_oracle(pool: &Cfmm, trades: &[Trade]) -> Result<Vec<bool>> {
    let (pnl, states) = sequential(pool, trades)?;
    (0..trades.len().saturating_sub(1))
        .map(|i| {
            let (joint, _) = bundle(&states[i], &trades[i..i + 2]).map_err(|e| Error::at(i, e))?;
            let split = pnl[i] + pnl[i + 1];
            Ok(joint <= split + TOL * split.abs().max(1.0))
        })
        .collect()
}

/// Evaluates the analytic sufficient condition for locality of each adjacent
/// pair `(i, i + 1)`. Requires a common slippage limit.
pub fn check_pairwise_locality_condition(
    curv: &CurvatureBounds,
    g0: f64,
    trades: &[Trade],
    bounds: &PnlBounds,
) -> Result<Vec<bool>> {
    curv.validate()?;
    if let Some(first) = trades.first() {
        if trades.iter().any(|t| t.eta != first.eta) {
            return Err(Error::InvalidParameter("pairwise condition needs a common slippage limit"));
        }
    }
    let CurvatureBounds { mu, kappa, beta, .. } = *curv;
    let (nu, gamma) = (bounds.nu, bounds.gamma_seq);
    let q = mu / kappa;
    let offset = q * (kappa / beta - g0);
    let mult = 2.0 + q * nu;
    let base = 3.0 + q * nu;
    let e = mu / (mu + kappa * gamma);
    let p = |l: usize| (-1.0 - q * (nu + 1.0)) * trades[l].delta + offset;

    let mut out = Vec::with_capacity(trades.len().saturating_sub(1));
    for i in 0..trades.len().saturating_sub(1) {
        // Pair (i+1, i+2) in one-based indexing.
        let k = i + 1;
        let history: f64 = (0..i).map(|l| p(l) * powi(base, (k - l - 2) as i32)).sum();
        let lhs = (q * (nu + 1.0) - 1.0) * (trades[i].delta + trades[i + 1].delta)
            + offset
            + mult * history
            - powi(e, k as i32)
            - powi(e, k as i32 + 1);
        out.push(lhs <= 0.0);
    }
    Ok(out)
}
