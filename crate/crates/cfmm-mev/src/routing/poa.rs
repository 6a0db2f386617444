use super::network::{Network, Slippage};
use super::optimal::{optimal_route, OptimalRoute};
use super::selfish::{selfish_route, Equilibrium};
use crate::cfmm::CurvatureBounds;
use crate::error::{Error, Result};
use crate::math::powi;

/// Optimal and selfish routing under attack, and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Welfare {
    pub optimum: OptimalRoute,
    pub equilibrium: Equilibrium,
    /// `optimum.total / equilibrium.total`.
    pub poa: f64,
}

pub fn welfare_and_poa(net: &Network, total: f64, slippage: &Slippage) -> Result<Welfare> {
    let optimum = optimal_route(net, total, Some(slippage))?;
    let equilibrium = selfish_route(net, total, Some(slippage))?;
    if !(equilibrium.total > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let poa = optimum.total / equilibrium.total;
    Ok(Welfare { optimum, equilibrium, poa })
}

/// Smoothness coefficients and the price-of-anarchy bound they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessBound {
    pub lambda: f64,
    pub nu: f64,
    /// `(1 - lambda) / nu`.
    pub bound: f64,
    /// The bound is below one and says nothing.
    pub vacuous: bool,
}

/// Smoothness bound for paths of `path_len` edges whose front-runs satisfy
/// `g^L alpha <= front-run <= f^L alpha`.
pub fn poa_smoothness_bound(
    curv: &CurvatureBounds,
    f: f64,
    g: f64,
    path_len: usize,
) -> Result<SmoothnessBound> {
    if path_len == 0 {
        return Err(Error::InvalidParameter("path length must be positive"));
    }
    let (mu, kappa) = (curv.mu, curv.kappa);
    let fl = powi(f, path_len as i32);
    let gl = powi(g, path_len as i32);
    let num = kappa + kappa * gl - mu * fl;
    let den = mu + mu * fl - kappa * gl;
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::DegenerateConstants);
    }
    let lambda = num / den;
    let nu = lambda;
    let bound = (1.0 - lambda) / nu;
    Ok(SmoothnessBound { lambda, nu, bound, vacuous: bound < 1.0 })
}
