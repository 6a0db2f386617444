//! Sequences of sandwiched trades in one block and the effect of reordering them.

mod bounds;
mod cof;
mod scaling;

pub use bounds::{
    check_sequence_bounds, pnl_sequence_bounds, Assumption, DEFAULT_DRIFT_TOL, PnlBoundConstants, SequenceBound,
    SequenceBoundReport,
};
pub use cof::{cof_estimate, cof_estimate_without_replacement, cof_exact, CofEstimate, CofSample};
pub use scaling::{cof_scaling_study, fit_line, LinearFit, Magnitude, PoolTemplate, ScalingPoint, ScalingStudy, TradeDistribution};

use alloc::vec::Vec;

use crate::cfmm::Cfmm;
use crate::error::{Error, Result};
use crate::sandwich::{execute_sandwich, SandwichResult, Trade};

/// Every trade of a sequence sandwiched in turn on evolving reserves.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceResult {
    pub results: Vec<SandwichResult>,
    /// Attacker profit per trade.
    pub pnl: Vec<f64>,
    /// Input tokens each sandwich leaves in the pool.
    pub net_inputs: Vec<f64>,
    /// Running sums of `net_inputs`, through and including each trade.
    pub drifts: Vec<f64>,
    pub final_pool: Cfmm,
}

impl SequenceResult {
    pub fn total_pnl(&self) -> f64 {
        self.pnl.iter().sum()
    }
}

/// Sandwiches `trades` in order, each against the reserves the previous one left.
pub fn simulate_sequence(pool: &Cfmm, trades: &[Trade]) -> Result<SequenceResult> {
    let n = trades.len();
    let mut out = SequenceResult {
        results: Vec::with_capacity(n),
        pnl: Vec::with_capacity(n),
        net_inputs: Vec::with_capacity(n),
        drifts: Vec::with_capacity(n),
        final_pool: *pool,
    };
    let mut state = *pool;
    let mut drift = 0.0;
    for (i, t) in trades.iter().enumerate() {
        let s = execute_sandwich(&state, t).map_err(|e| Error::at(i, e))?;
        let xi = s.net_input(t.delta);
        drift += xi;
        out.drifts.push(drift);
        out.net_inputs.push(xi);
        out.pnl.push(s.pnl);
        out.results.push(s);
        state = s.reserves_after;
    }
    out.final_pool = state;
    Ok(out)
}
