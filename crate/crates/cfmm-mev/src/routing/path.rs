//! Sandwich attacks along a routing path.

use alloc::vec;
use alloc::vec::Vec;

use crate::cfmm::{CurvatureBounds, EdgeFn, ExchangeFunction};
use crate::error::{Error, Result};
use crate::math::{pow, sqrt};
use crate::sandwich::{optimal_sandwich, Trade};

/// Composition of edge exchange functions along a path, first edge first.
#[derive(Debug, Clone, Copy)]
pub struct Chain<'a> {
    pub edges: &'a [EdgeFn],
}

impl ExchangeFunction for Chain<'_> {
    fn output(&self, x: f64) -> Result<f64> {
        self.edges.iter().try_fold(x, |v, e| e.output(v))
    }

    fn rate(&self, x: f64) -> Result<f64> {
        let mut v = x;
        let mut d = 1.0;
        for e in self.edges {
            d *= e.rate(v)?;
            v = e.output(v)?;
        }
        Ok(d)
    }

    fn rate_slope(&self, x: f64) -> Result<f64> {
        let (mut v, mut d1, mut d2) = (x, 1.0, 0.0);
        for e in self.edges {
            let g = e.rate(v)?;
            d2 = e.rate_slope(v)? * d1 * d1 + g * d2;
            d1 *= g;
            v = e.output(v)?;
        }
        Ok(d2)
    }

    fn inverse(&self, y: f64) -> Result<f64> {
        self.edges.iter().rev().try_fold(y, |v, e| e.inverse(v))
    }

    fn input_floor(&self) -> f64 {
        self.edges.first().map_or(0.0, |e| e.input_floor())
    }

    fn strictly_concave(&self) -> bool {
        self.edges.iter().any(|e| e.strictly_concave())
    }
}

/// Result of attacking a user who routes along one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSandwich {
    /// Slippage each edge must absorb so the path delivers `(1 - eta) G_p`.
    pub edge_slippage: Vec<f64>,
    /// Front-run on each edge at its implied slippage; `None` where the edge
    /// cannot be sandwiched.
    pub edge_sandwich: Vec<Option<f64>>,
    /// Front-run, in source tokens, against the composed path function.
    pub aggregate: f64,
    pub sandwichable: bool,
    /// `G_p(alpha + aggregate) - G_p(aggregate)`.
    pub output: f64,
    /// `G_p(alpha)` without an attacker.
    pub nominal_output: f64,
}

/// Sandwiches a user pushing `edge_inputs[0]` along `edges`.
///
/// `edge_inputs[i]` is the user's inflow into edge `i`. The slippage budget
/// is split backwards from the last edge: each edge's share is whatever keeps
/// the downstream output at `(1 - eta) G_p`.
pub fn path_sandwich(edges: &[EdgeFn], edge_inputs: &[f64], eta: f64) -> Result<PathSandwich> {
    let k = edges.len();
    if k == 0 || edge_inputs.len() != k {
        return Err(Error::InvalidParameter("one input per path edge required"));
    }
    if edge_inputs.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidParameter("edge inputs must be positive"));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter("slippage limit must lie in [0, 1)"));
    }
    let chain = Chain { edges };
    let alpha = edge_inputs[0];
    let nominal_output = chain.output(alpha)?;
    if eta == 0.0 {
        return Ok(PathSandwich {
            edge_slippage: vec![0.0; k],
            edge_sandwich: vec![Some(0.0); k],
            aggregate: 0.0,
            sandwichable: true,
            output: nominal_output,
            nominal_output,
        });
    }

    let mut edge_slippage = vec![0.0; k];
    edge_slippage[k - 1] = eta;
    let mut target = (1.0 - eta) * edges[k - 1].output(edge_inputs[k - 1])?;
    for i in (0..k - 1).rev() {
        let needed = edges[i + 1].inverse(target)?;
        edge_slippage[i] = 1.0 - needed / edges[i].output(edge_inputs[i])?;
        target = needed;
    }
    let mut edge_sandwich = Vec::with_capacity(k);
    for i in 0..k {
        let s = edge_slippage[i];
        let x = if (0.0..1.0).contains(&s) {
            match optimal_sandwich(&edges[i], &Trade { delta: edge_inputs[i], eta: s }) {
                Ok(x) => Some(x),
                Err(Error::NoSolution | Error::BracketExhausted) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        edge_sandwich.push(x);
    }

    let (aggregate, sandwichable) = match optimal_sandwich(&chain, &Trade { delta: alpha, eta }) {
        Ok(x) => (x, true),
        Err(Error::NoSolution | Error::BracketExhausted) => (0.0, false),
        Err(e) => return Err(e),
    };
    let output = if sandwichable {
        chain.output(alpha + aggregate)? - chain.output(aggregate)?
    } else {
        nominal_output
    };
    Ok(PathSandwich { edge_slippage, edge_sandwich, aggregate, sandwichable, output, nominal_output })
}

/// Bounds `g^L alpha <= aggregate front-run <= f^L alpha` for a path of
/// `L` edges that all satisfy `curv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathBounds {
    pub upper: f64,
    pub lower: f64,
    pub f: f64,
    pub g: f64,
    /// The slippage hypothesis of the upper bound holds.
    pub upper_valid: bool,
    /// The lower bound is the analytic one (single edge with `beta > 0`), not
    /// the trivial `0`.
    pub lower_analytic: bool,
}

/// Applies the single-trade front-run bounds to the composed path function,
/// whose output per unit input lies in `[kappa^L, mu^L]`.
///
/// The analytic lower bound needs the liquidity constant of the composition,
/// which is only known for single-edge paths; longer paths fall back to `0`.
pub fn path_sandwich_bounds(
    curv: &CurvatureBounds,
    g0: f64,
    path_len: usize,
    eta: f64,
    alpha: f64,
) -> Result<PathBounds> {
    curv.validate()?;
    if path_len == 0 || !(alpha.is_finite() && alpha > 0.0) || !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter("path bounds need a path, alpha > 0 and eta in [0, 1)"));
    }
    if eta == 0.0 {
        return Ok(PathBounds { upper: 0.0, lower: 0.0, f: 0.0, g: 0.0, upper_valid: true, lower_analytic: false });
    }
    let l = path_len as i32;
    let mu = pow(curv.mu, l as f64);
    let kappa = pow(curv.kappa, l as f64);
    let upper = (eta * mu / (mu - kappa) - 1.0) * alpha;
    let upper_valid = eta >= 1.0 - kappa / mu && alpha <= curv.trade_interval;
    let beta = curv.beta;
    let (lower, lower_analytic) = if path_len == 1 && beta > 0.0 && alpha < mu / beta {
        let gamma = 1.0 + sqrt(1.0 + beta * alpha * (1.0 + (eta * mu + g0) / (mu - kappa * alpha)));
        ((mu / beta - alpha) * gamma, true)
    } else {
        (0.0, false)
    };
    Ok(PathBounds {
        upper,
        lower,
        f: signed_root(upper / alpha, path_len),
        g: signed_root(lower / alpha, path_len),
        upper_valid,
        lower_analytic,
    })
}

/// Real `n`-th root keeping the sign for odd `n`; `NaN` for even roots of negatives.
fn signed_root(x: f64, n: usize) -> f64 {
    if n == 1 {
        return x;
    }
    if x < 0.0 {
        return if n % 2 == 1 { -pow(-x, 1.0 / n as f64) } else { f64::NAN };
    }
    pow(x, 1.0 / n as f64)
}
