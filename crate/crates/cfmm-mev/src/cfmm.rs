//! Exchange functions and curvature constants.
//!
//! An exchange function `G` maps a signed input flow to a signed output flow.
//! A positive input tenders the input token and receives the output token; a
//! negative input withdraws input tokens from the pool and pays output tokens.

use crate::error::{Error, Result};
use crate::math;

/// A monotone exchange function with its first two derivatives and inverse.
pub trait ExchangeFunction {
    /// Output `G(delta)` for a signed input `delta`.
    fn output(&self, delta: f64) -> Result<f64>;

    /// Marginal rate `g(delta) = G'(delta)`.
    fn rate(&self, delta: f64) -> Result<f64>;

    /// Derivative of the marginal rate, `g'(delta)`.
    fn rate_slope(&self, delta: f64) -> Result<f64>;

    /// Input that yields `out`, so `output(inverse(out)) == out`.
    fn inverse(&self, out: f64) -> Result<f64>;

    /// Inputs must stay strictly above this value.
    fn input_floor(&self) -> f64;

    fn strictly_concave(&self) -> bool;
}

/// Curve family of a two-asset pool.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CfmmKind {
    /// `R * R' = k`.
    ConstantProduct,
    /// `rate * R + R' = k`: a fixed exchange rate until reserves run out.
    ConstantSum { rate: f64 },
    /// `R^w * R'^(1-w) = k` with `w` the input-token weight.
    WeightedProduct { weight: f64 },
}

/// A two-asset pool holding `reserves_in` of the input token and
/// `reserves_out` of the output token.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cfmm {
    pub kind: CfmmKind,
    pub reserves_in: f64,
    pub reserves_out: f64,
}

impl Cfmm {
    pub fn new(kind: CfmmKind, reserves_in: f64, reserves_out: f64) -> Result<Self> {
        if !reserves_in.is_finite() || !reserves_out.is_finite() {
            return Err(Error::InvalidParameter("reserves must be finite"));
        }
        match kind {
            CfmmKind::ConstantProduct => {
                if reserves_in <= 0.0 || reserves_out <= 0.0 {
                    return Err(Error::NonPositiveReserves);
                }
            }
            CfmmKind::ConstantSum { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::InvalidParameter("constant-sum rate must be positive"));
                }
                if reserves_in < 0.0 || reserves_out < 0.0 {
                    return Err(Error::NonPositiveReserves);
                }
            }
            CfmmKind::WeightedProduct { weight } => {
                if !(weight > 0.0 && weight < 1.0) {
                    return Err(Error::InvalidParameter("weight must lie in (0, 1)"));
                }
                if reserves_in <= 0.0 || reserves_out <= 0.0 {
                    return Err(Error::NonPositiveReserves);
                }
            }
        }
        Ok(Cfmm { kind, reserves_in, reserves_out })
    }

    pub fn constant_product(reserves_in: f64, reserves_out: f64) -> Result<Self> {
        Self::new(CfmmKind::ConstantProduct, reserves_in, reserves_out)
    }

    pub fn constant_sum(rate: f64, reserves_in: f64, reserves_out: f64) -> Result<Self> {
        Self::new(CfmmKind::ConstantSum { rate }, reserves_in, reserves_out)
    }

    pub fn weighted_product(weight: f64, reserves_in: f64, reserves_out: f64) -> Result<Self> {
        Self::new(CfmmKind::WeightedProduct { weight }, reserves_in, reserves_out)
    }

    /// Value of the trading invariant at the current reserves.
    pub fn invariant(&self) -> f64 {
        let (r, rp) = (self.reserves_in, self.reserves_out);
        match self.kind {
            CfmmKind::ConstantProduct => r * rp,
            CfmmKind::ConstantSum { rate } => rate * r + rp,
            CfmmKind::WeightedProduct { weight } => {
                math::pow(r, weight) * math::pow(rp, 1.0 - weight)
            }
        }
    }

    /// Marginal price of the input token in output-token units.
    pub fn spot_rate(&self) -> f64 {
        self.rate(0.0).unwrap_or(f64::NAN)
    }

    /// Pool state after a user tenders the signed input `delta`.
    pub fn apply_trade(&self, delta: f64) -> Result<Cfmm> {
        check_finite(delta)?;
        let (r, rp) = (self.reserves_in, self.reserves_out);
        let new_in = r + delta;
        let new_out = match self.kind {
            CfmmKind::ConstantProduct => {
                if new_in <= 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                rp * (r / new_in)
            }
            CfmmKind::ConstantSum { rate } => {
                if new_in < 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                let out = rp - rate * delta;
                if out < 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                out
            }
            CfmmKind::WeightedProduct { weight } => {
                if new_in <= 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                rp * math::exp(-wp_ratio(weight) * math::ln1p(delta / r))
            }
        };
        Ok(Cfmm { kind: self.kind, reserves_in: new_in, reserves_out: new_out })
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("amount must be finite"))
    }
}

/// `w / (1 - w)`, the exponent of the weighted-product exchange function.
fn wp_ratio(weight: f64) -> f64 {
    weight / (1.0 - weight)
}

impl ExchangeFunction for Cfmm {
    fn output(&self, delta: f64) -> Result<f64> {
        check_finite(delta)?;
        let (r, rp) = (self.reserves_in, self.reserves_out);
        match self.kind {
            CfmmKind::ConstantProduct => {
                if r + delta <= 0.0 {
                    return Err(Error::DomainViolation);
                }
                Ok(rp * delta / (r + delta))
            }
            CfmmKind::ConstantSum { rate } => {
                let out = rate * delta;
                if out > rp || r + delta < 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                Ok(out)
            }
            CfmmKind::WeightedProduct { weight } => {
                if r + delta <= 0.0 {
                    return Err(Error::DomainViolation);
                }
                Ok(-rp * math::expm1(-wp_ratio(weight) * math::ln1p(delta / r)))
            }
        }
    }

    fn rate(&self, delta: f64) -> Result<f64> {
        check_finite(delta)?;
        let (r, rp) = (self.reserves_in, self.reserves_out);
        match self.kind {
            CfmmKind::ConstantProduct => {
                let s = r + delta;
                if s <= 0.0 {
                    return Err(Error::DomainViolation);
                }
                Ok(r * rp / (s * s))
            }
            CfmmKind::ConstantSum { rate } => {
                if rate * delta > rp || r + delta < 0.0 {
                    return Err(Error::DomainViolation);
                }
                Ok(rate)
            }
            CfmmKind::WeightedProduct { weight } => {
                let s = r + delta;
                if s <= 0.0 {
                    return Err(Error::DomainViolation);
                }
                let k = wp_ratio(weight);
                Ok(rp * k / r * math::exp(-(k + 1.0) * math::ln1p(delta / r)))
            }
        }
    }

    fn rate_slope(&self, delta: f64) -> Result<f64> {
        let g = self.rate(delta)?;
        let s = self.reserves_in + delta;
        Ok(match self.kind {
            CfmmKind::ConstantProduct => -2.0 * g / s,
            CfmmKind::ConstantSum { .. } => 0.0,
            CfmmKind::WeightedProduct { weight } => -(wp_ratio(weight) + 1.0) * g / s,
        })
    }

    fn inverse(&self, out: f64) -> Result<f64> {
        check_finite(out)?;
        let (r, rp) = (self.reserves_in, self.reserves_out);
        match self.kind {
            CfmmKind::ConstantProduct => {
                if out >= rp {
                    return Err(Error::OutputExceedsReserves);
                }
                Ok(r * out / (rp - out))
            }
            CfmmKind::ConstantSum { rate } => {
                if out > rp {
                    return Err(Error::OutputExceedsReserves);
                }
                let delta = out / rate;
                if r + delta < 0.0 {
                    return Err(Error::ReservesDepleted);
                }
                Ok(delta)
            }
            CfmmKind::WeightedProduct { weight } => {
                if out >= rp {
                    return Err(Error::OutputExceedsReserves);
                }
                Ok(r * math::expm1(-math::ln1p(-out / rp) / wp_ratio(weight)))
            }
        }
    }

    fn input_floor(&self) -> f64 {
        -self.reserves_in
    }

    fn strictly_concave(&self) -> bool {
        !matches!(self.kind, CfmmKind::ConstantSum { .. })
    }
}

/// A stateless edge `G(x) = coef * x^exponent` on `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEdge {
    pub coef: f64,
    pub exponent: f64,
}

impl PowerEdge {
    pub fn new(coef: f64, exponent: f64) -> Result<Self> {
        if !(coef.is_finite() && coef > 0.0) {
            return Err(Error::InvalidParameter("power edge coefficient must be positive"));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::InvalidParameter("power edge exponent must lie in (0, 1]"));
        }
        Ok(PowerEdge { coef, exponent })
    }

    pub fn sqrt() -> Self {
        PowerEdge { coef: 1.0, exponent: 0.5 }
    }

    pub fn identity() -> Self {
        PowerEdge { coef: 1.0, exponent: 1.0 }
    }

    fn check(x: f64) -> Result<()> {
        check_finite(x)?;
        if x < 0.0 {
            Err(Error::DomainViolation)
        } else {
            Ok(())
        }
    }
}

impl ExchangeFunction for PowerEdge {
    fn output(&self, x: f64) -> Result<f64> {
        Self::check(x)?;
        Ok(self.coef * math::pow(x, self.exponent))
    }

    fn rate(&self, x: f64) -> Result<f64> {
        Self::check(x)?;
        if self.exponent == 1.0 {
            return Ok(self.coef);
        }
        Ok(self.coef * self.exponent * math::pow(x, self.exponent - 1.0))
    }

    fn rate_slope(&self, x: f64) -> Result<f64> {
        Self::check(x)?;
        if self.exponent == 1.0 {
            return Ok(0.0);
        }
        let p = self.exponent;
        Ok(self.coef * p * (p - 1.0) * math::pow(x, p - 2.0))
    }

    fn inverse(&self, out: f64) -> Result<f64> {
        Self::check(out)?;
        Ok(math::pow(out / self.coef, 1.0 / self.exponent))
    }

    fn input_floor(&self) -> f64 {
        0.0
    }

    fn strictly_concave(&self) -> bool {
        self.exponent < 1.0
    }
}

/// Exchange function carried by a routing edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeFn {
    Pool(Cfmm),
    Power(PowerEdge),
}

impl From<Cfmm> for EdgeFn {
    fn from(c: Cfmm) -> Self {
        EdgeFn::Pool(c)
    }
}

impl From<PowerEdge> for EdgeFn {
    fn from(p: PowerEdge) -> Self {
        EdgeFn::Power(p)
    }
}

macro_rules! delegate {
    ($self:ident, $f:ident($($a:expr),*)) => {
        match $self {
            EdgeFn::Pool(c) => c.$f($($a),*),
            EdgeFn::Power(p) => p.$f($($a),*),
        }
    };
}

impl ExchangeFunction for EdgeFn {
    fn output(&self, x: f64) -> Result<f64> {
        delegate!(self, output(x))
    }
    fn rate(&self, x: f64) -> Result<f64> {
        delegate!(self, rate(x))
    }
    fn rate_slope(&self, x: f64) -> Result<f64> {
        delegate!(self, rate_slope(x))
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        delegate!(self, inverse(y))
    }
    fn input_floor(&self) -> f64 {
        delegate!(self, input_floor())
    }
    fn strictly_concave(&self) -> bool {
        delegate!(self, strictly_concave())
    }
}

impl<T: ExchangeFunction + ?Sized> ExchangeFunction for &T {
    fn output(&self, x: f64) -> Result<f64> {
        (**self).output(x)
    }
    fn rate(&self, x: f64) -> Result<f64> {
        (**self).rate(x)
    }
    fn rate_slope(&self, x: f64) -> Result<f64> {
        (**self).rate_slope(x)
    }
    fn inverse(&self, y: f64) -> Result<f64> {
        (**self).inverse(y)
    }
    fn input_floor(&self) -> f64 {
        (**self).input_floor()
    }
    fn strictly_concave(&self) -> bool {
        (**self).strictly_concave()
    }
}

/// Curvature constants of an exchange function on `[0, interval]`.
///
/// * `alpha`, `beta`: upper and lower bounds on `(g(0) - g(d)) / d`.
/// * `mu`, `kappa`: upper and lower bounds on `G(d) / d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBounds {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub kappa: f64,
    /// Upper end `M` of the certified interval `[0, M]`.
    pub trade_interval: f64,
    pub grid_points: usize,
}

impl CurvatureBounds {
    /// Rejects constants the bound evaluators cannot use.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.mu, self.kappa].iter().all(|v| v.is_finite());
        if !finite || self.kappa <= 0.0 || self.kappa >= self.mu {
            return Err(Error::InvalidCurvature);
        }
        Ok(())
    }

    /// Worst-case constants over several edges: largest `mu`, `alpha` and
    /// smallest `kappa`, `beta`.
    pub fn uniform<'a, I>(bounds: I) -> Option<CurvatureBounds>
    where
        I: IntoIterator<Item = &'a CurvatureBounds>,
    {
        bounds.into_iter().copied().reduce(|a, b| CurvatureBounds {
            alpha: a.alpha.max(b.alpha),
            beta: a.beta.min(b.beta),
            mu: a.mu.max(b.mu),
            kappa: a.kappa.min(b.kappa),
            trade_interval: a.trade_interval.min(b.trade_interval),
            grid_points: a.grid_points.min(b.grid_points),
        })
    }
}

struct Extremes {
    slope_max: f64,
    slope_min: f64,
    ratio_max: f64,
    ratio_min: f64,
}

impl Extremes {
    fn new(slope: f64, ratio: f64) -> Self {
        Extremes { slope_max: slope, slope_min: slope, ratio_max: ratio, ratio_min: ratio }
    }

    fn push(&mut self, slope: f64, ratio: f64) {
        self.slope_max = self.slope_max.max(slope);
        self.slope_min = self.slope_min.min(slope);
        self.ratio_max = self.ratio_max.max(ratio);
        self.ratio_min = self.ratio_min.min(ratio);
    }

    fn finish(self, interval: f64, grid_points: usize) -> Result<CurvatureBounds> {
        let b = CurvatureBounds {
            alpha: self.slope_max.max(0.0),
            beta: self.slope_min.max(0.0),
            mu: self.ratio_max,
            kappa: self.ratio_min,
            trade_interval: interval,
            grid_points,
        };
        if [b.alpha, b.beta, b.mu, b.kappa].iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainViolation);
        }
        Ok(b)
    }
}

fn check_grid(interval: f64, grid_points: usize) -> Result<()> {
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::InvalidParameter("curvature interval must be positive"));
    }
    if grid_points < 16 {
        return Err(Error::InvalidParameter("curvature grid needs at least 16 points"));
    }
    Ok(())
}

/// Estimates curvature constants on `[0, interval]` from a uniform grid of
/// `grid_points` trade sizes together with the `d -> 0` limits.
pub fn estimate_curvature<F: ExchangeFunction + ?Sized>(
    f: &F,
    interval: f64,
    grid_points: usize,
) -> Result<CurvatureBounds> {
    check_grid(interval, grid_points)?;
    let g0 = f.rate(0.0)?;
    let mut ext = Extremes::new(-f.rate_slope(0.0)?, g0);
    for j in 1..=grid_points {
        let d = interval * j as f64 / grid_points as f64;
        ext.push((g0 - f.rate(d)?) / d, f.output(d)? / d);
    }
    ext.finish(interval, grid_points)
}

/// Like [`estimate_curvature`] but also samples withdrawals on `[-interval, 0)`.
///
/// Withdrawals fail when `interval` reaches the input floor of `f`.
pub fn estimate_curvature_two_sided<F: ExchangeFunction + ?Sized>(
    f: &F,
    interval: f64,
    grid_points: usize,
) -> Result<CurvatureBounds> {
    check_grid(interval, grid_points)?;
    if -interval <= f.input_floor() {
        return Err(Error::DomainViolation);
    }
    let g0 = f.rate(0.0)?;
    let mut ext = Extremes::new(-f.rate_slope(0.0)?, g0);
    for j in 1..=grid_points {
        let d = interval * j as f64 / grid_points as f64;
        ext.push((g0 - f.rate(d)?) / d, f.output(d)? / d);
        ext.push((f.rate(-d)? - g0) / d, f.output(-d)? / -d);
    }
    ext.finish(interval, grid_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_product_reference_values() {
        let p = Cfmm::constant_product(1.0, 2.0).unwrap();
        assert_eq!(p.output(1.0).unwrap(), 1.0);
        assert_eq!(p.rate(0.0).unwrap(), 2.0);
        assert_eq!(p.inverse(1.0).unwrap(), 1.0);
        let q = p.apply_trade(1.0).unwrap();
        assert_eq!((q.reserves_in, q.reserves_out), (2.0, 1.0));
    }

    #[test]
    fn constant_product_curvature_on_unit_interval() {
        let p = Cfmm::constant_product(1.0, 2.0).unwrap();
        let c = estimate_curvature(&p, 1.0, 1000).unwrap();
        assert!((c.mu - 2.0).abs() < 1e-12);
        assert!((c.kappa - 1.0).abs() < 1e-12);
        assert!((c.alpha - 4.0).abs() < 1e-12);
        assert!((c.beta - 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_sum_has_flat_curvature() {
        let p = Cfmm::constant_sum(1.0, 10.0, 10.0).unwrap();
        let c = estimate_curvature(&p, 1.0, 64).unwrap();
        assert_eq!((c.alpha, c.beta, c.mu, c.kappa), (0.0, 0.0, 1.0, 1.0));
        assert!(!p.strictly_concave());
        assert_eq!(p.output(11.0), Err(Error::ReservesDepleted));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Cfmm::constant_product(0.0, 1.0), Err(Error::NonPositiveReserves));
        assert!(Cfmm::weighted_product(1.0, 1.0, 1.0).is_err());
        assert!(Cfmm::constant_sum(0.0, 1.0, 1.0).is_err());
        assert!(PowerEdge::new(1.0, 1.5).is_err());
        let p = Cfmm::constant_product(1.0, 1.0).unwrap();
        assert_eq!(p.inverse(1.0), Err(Error::OutputExceedsReserves));
        assert_eq!(p.apply_trade(-1.0), Err(Error::ReservesDepleted));
        assert!(p.output(f64::NAN).is_err());
    }

    #[test]
    fn half_weight_product_matches_constant_product() {
        let w = Cfmm::weighted_product(0.5, 3.0, 7.0).unwrap();
        let c = Cfmm::constant_product(3.0, 7.0).unwrap();
        for d in [-2.5, -0.1, 0.3, 1.0, 40.0] {
            assert!((w.output(d).unwrap() - c.output(d).unwrap()).abs() < 1e-13);
            assert!((w.rate(d).unwrap() - c.rate(d).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn power_edge_domain() {
        let e = PowerEdge::sqrt();
        assert_eq!(e.output(4.0).unwrap(), 2.0);
        assert_eq!(e.inverse(3.0).unwrap(), 9.0);
        assert_eq!(e.output(-1.0), Err(Error::DomainViolation));
        assert!(estimate_curvature(&e, 1.0, 32).is_err());
        assert!(!PowerEdge::identity().strictly_concave());
    }

    #[test]
    fn two_sided_widens_constants() {
        let p = Cfmm::constant_product(4.0, 4.0).unwrap();
        let one = estimate_curvature(&p, 1.0, 100).unwrap();
        let two = estimate_curvature_two_sided(&p, 1.0, 100).unwrap();
        assert!(two.mu > one.mu && two.alpha > one.alpha);
        assert_eq!(two.kappa, one.kappa);
    }
}
