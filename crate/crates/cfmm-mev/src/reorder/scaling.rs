//! How the cost of feudalism grows with the number of trades in a block.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cof::{cof_estimate, CofSample};
use crate::cfmm::{Cfmm, CfmmKind};
use crate::error::{Error, Result};
use crate::math::ln;
use crate::sandwich::Trade;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
}

/// Generator for synthetic trade sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeDistribution {
    pub magnitude: Magnitude,
    /// Alternate buys and sells, starting with a buy.
    pub alternating: bool,
    pub eta: f64,
}

impl TradeDistribution {
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<Trade>> {
        (0..n)
            .map(|i| {
                let size = match self.magnitude {
                    Magnitude::Constant(d) => d,
                    Magnitude::Uniform { lo, hi } => {
                        if !(0.0 < lo && lo <= hi && hi.is_finite()) {
                            return Err(Error::InvalidParameter("uniform magnitudes need 0 < lo <= hi"));
                        }
                        lo + (hi - lo) * rng.random::<f64>()
                    }
                };
                let sign = if self.alternating && i % 2 == 1 { -1.0 } else { 1.0 };
                Trade::new(sign * size, self.eta)
            })
            .collect()
    }
}

/// Pool sized relative to the sequence: `reserves_in = depth * sum |delta|`
/// and `reserves_out = price * reserves_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolTemplate {
    pub kind: CfmmKind,
    pub depth: f64,
    pub price: f64,
}

impl PoolTemplate {
    pub fn build(&self, trades: &[Trade]) -> Result<Cfmm> {
        let volume: f64 = trades.iter().map(|t| t.delta.abs()).sum();
        let r = self.depth * volume;
        Cfmm::new(self.kind, r, self.price * r)
    }
}

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InvalidParameter("fit needs two or more paired points"));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| { let r = b - intercept - slope * a; r * r }).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub n: usize,
    pub cof: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub samples: Vec<CofSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub points: Vec<ScalingPoint>,
    /// Fit of cof against `ln n`.
    pub log_fit: LinearFit,
    /// Fit of cof against `n`.
    pub linear_fit: LinearFit,
}

impl ScalingStudy {
    pub fn log_fit_better(&self) -> bool {
        self.log_fit.r2 > self.linear_fit.r2
    }
}

/// Estimates the cost of feudalism at each block size in `n_values`.
///
/// Trades for size `n` come from stream `u64::MAX - n` of the seeded
/// generator, disjoint from the permutation streams.
pub fn cof_scaling_study(
    template: &PoolTemplate,
    dist: &TradeDistribution,
    n_values: &[usize],
    k: usize,
    seed: u64,
) -> Result<ScalingStudy> {
    let mut points = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX - n as u64);
        let trades = dist.sample(n, &mut rng)?;
        let pool = template.build(&trades)?;
        let est = cof_estimate(&pool, &trades, k, seed)?;
        points.push(ScalingPoint {
            n,
            cof: est.cof,
            numerator: est.numerator,
            denominator: est.denominator,
            samples: est.samples,
        });
    }
    let y: Vec<f64> = points.iter().map(|p| p.cof).collect();
    let logs: Vec<f64> = points.iter().map(|p| ln(p.n as f64)).collect();
    let lin: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    Ok(ScalingStudy { log_fit: fit_line(&logs, &y)?, linear_fit: fit_line(&lin, &y)?, points })
}
