//! Per-trade profit bounds for a sandwiched sequence.
//!
//! With `q = mu / kappa` the bounds for the `i`-th trade (one-based) are
//!
//! ```text
//! p_l   = (a - 1) delta_l + b
//! upper = a delta_i + b + c * sum_{l < i} p_l d^(i - l - 1)
//! lower = delta_i + e^i
//! ```
//!
//! where `a = -q (nu + 1)`, `b = q (kappa / beta - g0)`, `c = 2 + q nu`,
//! `d = 3 + q nu` and `e = mu / (mu + kappa gamma)`. The lower bound is only
//! derived for even `i`.

use alloc::vec::Vec;

use super::simulate_sequence;
use crate::cfmm::{Cfmm, CurvatureBounds};
use crate::error::{Error, Result};
use crate::math::powi;
use crate::sandwich::{PnlBounds, Trade};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnlBoundConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    /// `mu >= g0 * beta`.
    pub price_ok: bool,
    /// `gamma >= mu / (kappa - 1)`.
    pub gamma_ok: bool,
}

impl PnlBoundConstants {
    pub fn new(curv: &CurvatureBounds, g0: f64, nu: f64, gamma: f64) -> Result<Self> {
        curv.validate()?;
        let CurvatureBounds { mu, kappa, beta, .. } = *curv;
        let q = mu / kappa;
        let c = PnlBoundConstants {
            a: -q * (nu + 1.0),
            b: q * (kappa / beta - g0),
            c: 2.0 + q * nu,
            d: 3.0 + q * nu,
            e: mu / (mu + kappa * gamma),
            price_ok: mu >= g0 * beta,
            gamma_ok: gamma >= mu / (kappa - 1.0),
        };
        if [c.a, c.b, c.c, c.d, c.e].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConstants);
        }
        Ok(c)
    }

    /// Uses the root ratios computed for a representative trade.
    pub fn from_bounds(curv: &CurvatureBounds, g0: f64, b: &PnlBounds) -> Result<Self> {
        Self::new(curv, g0, b.nu, b.gamma_seq)
    }

    /// Hypotheses plus the shape conditions `0 < d` and `e < 1`.
    pub fn valid(&self) -> bool {
        self.price_ok && self.gamma_ok && self.d > 0.0 && self.e < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceBound {
    pub lower: f64,
    pub upper: f64,
    /// The lower bound is derived only at even one-based positions.
    pub lower_applies: bool,
}

/// Evaluates the bounds for every position of `trades`.
pub fn pnl_sequence_bounds(k: &PnlBoundConstants, trades: &[Trade]) -> Result<Vec<SequenceBound>> {
    let mut out = Vec::with_capacity(trades.len());
    // Running value of sum_{l < i} p_l d^(i - l - 1).
    let mut history = 0.0;
    for (idx, t) in trades.iter().enumerate() {
        let i = idx + 1;
        let upper = k.a * t.delta + k.b + k.c * history;
        let lower = t.delta + powi(k.e, i as i32);
        if !(upper.is_finite() && lower.is_finite()) {
            return Err(Error::InvalidConstants);
        }
        out.push(SequenceBound { lower, upper, lower_applies: i % 2 == 0 });
        history = history * k.d + (k.a - 1.0) * t.delta + k.b;
    }
    Ok(out)
}

/// Hypothesis that failed for a sequence-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Some drift exceeds the tolerated fraction of total volume.
    DriftRegime,
    Locality,
    Constants,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBoundReport {
    pub bounds: Vec<SequenceBound>,
    pub pnl: Vec<f64>,
    pub max_drift: f64,
    pub drift_limit: f64,
    /// First failed hypothesis; when set, violations are informational.
    pub assumption_violated: Option<Assumption>,
    /// Zero-based positions where the simulated profit exceeds the upper bound.
    pub upper_violations: Vec<usize>,
    /// Zero-based positions, among those where it applies, below the lower bound.
    pub lower_violations: Vec<usize>,
}

impl SequenceBoundReport {
    /// Hypotheses hold and no bound is violated.
    pub fn holds(&self) -> bool {
        self.assumption_violated.is_none()
            && self.upper_violations.is_empty()
            && self.lower_violations.is_empty()
    }
}

/// Drift tolerance for [`check_sequence_bounds`] when the caller has no better choice.
pub const DEFAULT_DRIFT_TOL: f64 = 0.05;

/// Simulates `trades` on `pool` and compares each profit with its bounds.
///
/// `drift_tol` caps `max |drift|` as a fraction of `sum |delta|`.
/// `strongly_local` is the caller's claim about the sequence.
pub fn check_sequence_bounds(
    k: &PnlBoundConstants,
    pool: &Cfmm,
    trades: &[Trade],
    drift_tol: f64,
    strongly_local: bool,
) -> Result<SequenceBoundReport> {
    let bounds = pnl_sequence_bounds(k, trades)?;
    let sim = simulate_sequence(pool, trades)?;
    let volume: f64 = trades.iter().map(|t| t.delta.abs()).sum();
    let max_drift = sim.drifts.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let drift_limit = drift_tol * volume;
    let assumption_violated = if !k.valid() {
        Some(Assumption::Constants)
    } else if max_drift > drift_limit {
        Some(Assumption::DriftRegime)
    } else if !strongly_local {
        Some(Assumption::Locality)
    } else {
        None
    };
    let slack = |v: f64| 1e-9 * v.abs().max(1.0);
    let upper_violations = (0..trades.len())
        .filter(|&i| sim.pnl[i] > bounds[i].upper + slack(bounds[i].upper))
        .collect();
    let lower_violations = (0..trades.len())
        .filter(|&i| bounds[i].lower_applies && sim.pnl[i] < bounds[i].lower - slack(bounds[i].lower))
        .collect();
    Ok(SequenceBoundReport {
        bounds,
        pnl: sim.pnl,
        max_drift,
        drift_limit,
        assumption_violated,
        upper_violations,
        lower_violations,
    })
}
