//! Analytic bounds on front-run size, back-run size and attacker profit,
//! evaluated from curvature constants.

use super::Trade;
use crate::cfmm::CurvatureBounds;
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Which hypotheses of the bound formulas hold for a given trade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundFlags {
    /// `eta >= 1 - kappa / mu`, required by the upper bounds.
    pub slippage: bool,
    /// `beta > 0` and `delta < mu / beta`, required by the lower bounds.
    pub liquidity: bool,
    /// `mu >= g(0) * beta`.
    pub price: bool,
    /// The curvature grid covers the trade size.
    pub covers: bool,
    pub upper_valid: bool,
    pub lower_valid: bool,
    pub pnl_valid: bool,
}

/// Bound values for one trade. Lower bounds are `NaN` when `beta == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnlBounds {
    pub ds_ub: f64,
    pub ds_lb: f64,
    pub dsp_ub: f64,
    pub dsp_lb: f64,
    pub pnl_ub: f64,
    pub pnl_lb: f64,
    /// Root scale of the front-run lower bound.
    pub gamma: f64,
    /// Positive-root ratio used by the sequence lower bound.
    pub gamma_seq: f64,
    /// Negative-root ratio used by the sequence upper bound.
    pub nu: f64,
    pub flags: BoundFlags,
}

/// Evaluates the single-trade bounds for `trade` under `curv`, where `g0` is
/// the marginal rate at zero trade size.
pub fn compute_pnl_bounds(curv: &CurvatureBounds, g0: f64, trade: &Trade) -> Result<PnlBounds> {
    curv.validate()?;
    if !(trade.delta > 0.0) {
        return Err(Error::InvalidParameter("bounds cover tendered trades only"));
    }
    if !(g0.is_finite() && g0 > 0.0) {
        return Err(Error::InvalidParameter("spot rate must be positive"));
    }
    let CurvatureBounds { mu, kappa, beta, .. } = *curv;
    let (d, eta) = (trade.delta, trade.eta);

    let ds_ub = (eta * mu / (mu - kappa) - 1.0) * d;
    let dsp_ub = (eta * (1.0 + mu / (mu - kappa)) - (2.0 - kappa / mu)) * d;

    let (gamma, ds_lb, dsp_lb, pnl_lb) = if beta > 0.0 {
        let gamma = 1.0 + sqrt(1.0 + beta * d * (1.0 + (eta * mu + g0) / (mu - kappa * d)));
        let ds_lb = (mu / beta - d) * gamma;
        let dsp_lb = mu * gamma / beta - d * (gamma + eta * mu / kappa);
        let pnl_lb = dsp_ub + d * gamma - mu * gamma / beta;
        (gamma, ds_lb, dsp_lb, pnl_lb)
    } else {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    };
    let pnl_ub = dsp_ub - ds_lb;

    let gamma_seq = root_ratio(mu, beta, g0, eta, d, 1.0);
    let nu = root_ratio(kappa, beta, g0, eta, d, -1.0);

    let slippage = eta >= 1.0 - kappa / mu;
    let liquidity = beta > 0.0 && d < mu / beta;
    let price = mu >= g0 * beta;
    let covers = d <= curv.trade_interval;
    let upper_valid = slippage && covers;
    let lower_valid = liquidity && covers && gamma.is_finite();
    let flags = BoundFlags {
        slippage,
        liquidity,
        price,
        covers,
        upper_valid,
        lower_valid,
        pnl_valid: upper_valid && lower_valid && price,
    };
    Ok(PnlBounds { ds_ub, ds_lb, dsp_ub, dsp_lb, pnl_ub, pnl_lb, gamma, gamma_seq, nu, flags })
}

/// Ratio of a quadratic root to `s / beta - delta - g0`, where `s` is `mu`
/// (positive root) or `kappa` (negative root), at zero drift.
fn root_ratio(s: f64, beta: f64, g0: f64, eta: f64, d: f64, sign: f64) -> f64 {
    if beta <= 0.0 {
        return f64::NAN;
    }
    let c = 0.5 * beta * d * d + (g0 - (1.0 + eta) * s) * d;
    let base = s / beta - d - g0;
    let disc = (d + g0 - s) * (d + g0 - s) - 2.0 * beta * c;
    (base + sign * sqrt(disc)) / base
}

/// Whether `(eta (1 + mu/kappa) - (2 - kappa/mu) + gamma) delta >= mu gamma / beta`,
/// the hurdle above which a trade is guaranteed to be profitably sandwiched.
pub fn hurdle_rate_check(curv: &CurvatureBounds, trade: &Trade, gamma: f64) -> Result<bool> {
    curv.validate()?;
    let CurvatureBounds { mu, kappa, beta, .. } = *curv;
    if beta == 0.0 {
        return Err(Error::BetaZero);
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter("gamma must be finite"));
    }
    let lhs = (trade.eta * (1.0 + mu / kappa) - (2.0 - kappa / mu) + gamma) * trade.delta;
    Ok(lhs >= mu * gamma / beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curv(mu: f64, kappa: f64, beta: f64) -> CurvatureBounds {
        CurvatureBounds { alpha: beta, beta, mu, kappa, trade_interval: 1.0, grid_points: 16 }
    }

    #[test]
    fn slippage_hypothesis_boundary_zeroes_upper_bound() {
        let c = curv(2.0, 1.0, 1.0);
        let t = Trade::new(0.5, 0.5).unwrap();
        let b = compute_pnl_bounds(&c, 2.0, &t).unwrap();
        assert!(b.ds_ub.abs() < 1e-15);
        assert!(b.flags.slippage);
    }

    #[test]
    fn rejects_inverted_curvature() {
        let c = curv(1.0, 1.0, 0.0);
        let t = Trade::new(0.5, 0.5).unwrap();
        assert_eq!(compute_pnl_bounds(&c, 1.0, &t), Err(Error::InvalidCurvature));
        assert_eq!(hurdle_rate_check(&c, &t, 1.0), Err(Error::InvalidCurvature));
    }

    #[test]
    fn zero_beta_leaves_lower_bounds_undefined() {
        let c = curv(2.0, 1.0, 0.0);
        let t = Trade::new(0.5, 0.5).unwrap();
        let b = compute_pnl_bounds(&c, 2.0, &t).unwrap();
        assert!(b.ds_lb.is_nan() && !b.flags.lower_valid);
        assert_eq!(hurdle_rate_check(&c, &t, 2.0), Err(Error::BetaZero));
    }

    #[test]
    fn vanishing_beta_fails_hurdle() {
        let c = curv(2.0, 1.0, 1e-300);
        let t = Trade::new(0.5, 0.9).unwrap();
        assert!(!hurdle_rate_check(&c, &t, 2.0).unwrap());
    }
}
