//! Single-trade sandwich attacks.
//!
//! A user tenders `delta` with slippage limit `eta`: the trade fails unless it
//! returns at least `G(delta) - eta * |G(delta)|`. The attacker front-runs with
//! the largest trade that keeps the user exactly at that limit, lets the user
//! trade, then sells back everything it bought.

mod bounds;
mod locality;

pub use bounds::{compute_pnl_bounds, hurdle_rate_check, BoundFlags, PnlBounds};
pub use locality::{
    check_pairwise_locality_condition, check_strong_locality_bruteforce, pairwise_locality_oracle,
    strong_locality_report, LocalityReport, MAX_BRUTEFORCE_TRADES,
};

use crate::cfmm::{Cfmm, ExchangeFunction};
use crate::error::{Error, Result};
use crate::math;
use crate::root::{bisect, Bisection};

/// A user trade: signed input `delta` and slippage tolerance `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trade {
    pub delta: f64,
    pub eta: f64,
}

impl Trade {
    pub fn new(delta: f64, eta: f64) -> Result<Self> {
        if !delta.is_finite() || delta == 0.0 {
            return Err(Error::InvalidParameter("trade size must be finite and nonzero"));
        }
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::InvalidParameter("slippage limit must lie in [0, 1)"));
        }
        Ok(Trade { delta, eta })
    }

    /// Smallest output the user accepts.
    pub fn min_output(&self, quoted: f64) -> f64 {
        quoted - self.eta * quoted.abs()
    }
}

/// Outcome of a front-run, user trade and back-run against one pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichResult {
    /// Front-run input `x`, same sign as the user trade.
    pub delta_sand: f64,
    /// Input tokens the attacker recovers in the back-run.
    pub delta_sand_prime: f64,
    /// `delta_sand_prime - delta_sand`, in input-token units.
    pub pnl: f64,
    /// Output the user actually receives.
    pub user_output: f64,
    /// Pool state once the back-run settles.
    pub reserves_after: Cfmm,
}

impl SandwichResult {
    /// Input tokens that stay in the pool: `delta_sand + delta - delta_sand_prime`.
    pub fn net_input(&self, delta: f64) -> f64 {
        self.delta_sand + delta - self.delta_sand_prime
    }
}

/// Optimal front-run size: the smallest `x` with
/// `G(x + delta) - G(x) = G(delta) - eta * |G(delta)|`.
///
/// Returns `0` when `eta == 0` and `Error::NoSolution` when `f` is not
/// strictly concave, since a linear curve cannot be moved against the user.
pub fn optimal_sandwich<F: ExchangeFunction + ?Sized>(f: &F, trade: &Trade) -> Result<f64> {
    let d = trade.delta;
    let quoted = f.output(d)?;
    if trade.eta == 0.0 {
        return Ok(0.0);
    }
    if !f.strictly_concave() {
        return Err(Error::NoSolution);
    }
    let target = trade.min_output(quoted);
    let h = |x: f64| Ok(f.output(x + d)? - f.output(x)? - target);
    let opts = Bisection::default();
    if d > 0.0 {
        // h(0) > 0 and h decreases in x.
        let (mut lo, mut hi) = (0.0, d);
        while h(hi)? > 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::BracketExhausted);
            }
        }
        bisect(h, lo, hi, opts)
    } else {
        // Withdrawal: x < 0, h(0) > 0 and h falls without bound towards the floor.
        let limit = f.input_floor() - d;
        if limit >= 0.0 {
            return Err(Error::DomainViolation);
        }
        let (mut lo, mut hi) = (d.max(0.5 * limit), 0.0);
        let mut halvings = 1;
        while h(lo)? > 0.0 {
            hi = lo;
            let doubled = 2.0 * lo;
            lo = if doubled > limit {
                doubled
            } else {
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::BracketExhausted);
                }
                limit * (1.0 - math::powi(0.5, halvings))
            };
        }
        bisect(h, lo, hi, opts)
    }
}

/// Closed-form front-run size on a constant-product pool for `delta > 0`.
pub fn optimal_sandwich_closed_form(
    reserves_in: f64,
    reserves_out: f64,
    trade: &Trade,
) -> Result<f64> {
    if !(reserves_in > 0.0 && reserves_out > 0.0) {
        return Err(Error::NonPositiveReserves);
    }
    if trade.delta <= 0.0 {
        return Err(Error::InvalidParameter("closed form covers tendered trades only"));
    }
    let (r, d, eta) = (reserves_in, trade.delta, trade.eta);
    // Positive root of x^2 + (d + 2r) x - c = 0, rationalised for small c.
    let c = (r * r + r * d) * eta / (1.0 - eta);
    let b = d + 2.0 * r;
    Ok(2.0 * c / (b + math::sqrt(b * b + 4.0 * c)))
}

/// Attacker profit from the closed identity `delta - G^-1(min_output)`.
///
/// Numerically steadier than differencing the back-run against the
/// front-run on deep pools.
pub fn sandwich_pnl<F: ExchangeFunction + ?Sized>(f: &F, trade: &Trade) -> Result<f64> {
    if trade.eta == 0.0 {
        return Ok(0.0);
    }
    let quoted = f.output(trade.delta)?;
    Ok(trade.delta - f.inverse(trade.min_output(quoted))?)
}

/// Runs the three-trade sequence against explicit pool reserves.
pub fn execute_sandwich(pool: &Cfmm, trade: &Trade) -> Result<SandwichResult> {
    let x = optimal_sandwich(pool, trade)?;
    let front = pool.apply_trade(x)?;
    let bought = pool.reserves_out - front.reserves_out;
    let user = front.apply_trade(trade.delta)?;
    let user_output = front.reserves_out - user.reserves_out;
    let back = user.inverse(-bought)?;
    let after = user.apply_trade(back)?;
    let recovered = -back;
    Ok(SandwichResult {
        delta_sand: x,
        delta_sand_prime: recovered,
        pnl: recovered - x,
        user_output,
        reserves_after: after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(r: f64, rp: f64) -> Cfmm {
        Cfmm::constant_product(r, rp).unwrap()
    }

    #[test]
    fn zero_slippage_means_no_attack() {
        let p = cp(10.0, 10.0);
        let t = Trade::new(1.0, 0.0).unwrap();
        assert_eq!(optimal_sandwich(&p, &t).unwrap(), 0.0);
        let s = execute_sandwich(&p, &t).unwrap();
        assert_eq!(s.pnl, 0.0);
        assert_eq!(s.delta_sand_prime, 0.0);
    }

    #[test]
    fn constant_sum_cannot_be_sandwiched() {
        let p = Cfmm::constant_sum(1.0, 10.0, 10.0).unwrap();
        let t = Trade::new(1.0, 0.1).unwrap();
        assert_eq!(optimal_sandwich(&p, &t), Err(Error::NoSolution));
    }

    #[test]
    fn bisection_matches_closed_form() {
        let p = cp(1.0, 1.0);
        let t = Trade::new(1.0, 0.5).unwrap();
        let x = optimal_sandwich(&p, &t).unwrap();
        let xc = optimal_sandwich_closed_form(1.0, 1.0, &t).unwrap();
        assert!((x - xc).abs() < 1e-12, "{x} vs {xc}");
        assert!((x - (-1.5 + 0.5 * 17f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn withdrawal_is_sandwiched_with_negative_front_run() {
        let p = cp(100.0, 100.0);
        let t = Trade::new(-1.0, 0.05).unwrap();
        let s = execute_sandwich(&p, &t).unwrap();
        assert!(s.delta_sand < 0.0);
        assert!(s.pnl > 0.0);
        let expected = 0.05 * (100.0 - 1.0) / (100.0 + 0.05);
        assert!((s.pnl - expected).abs() < 1e-10, "{} vs {expected}", s.pnl);
    }

    #[test]
    fn huge_tolerance_needs_huge_front_run() {
        let p = cp(1.0, 1.0);
        let t = Trade::new(1e-3, 0.999_999_999_999).unwrap();
        let x = optimal_sandwich(&p, &t).unwrap();
        // Output differences near the root are at the rounding floor.
        let exact = optimal_sandwich_closed_form(1.0, 1.0, &t).unwrap();
        assert!((x - exact).abs() < 0.05 * exact, "{x} vs {exact}");
    }
}
