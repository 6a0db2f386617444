//! Welfare-maximising allocation by projected gradient ascent on the simplex.

use alloc::vec;
use alloc::vec::Vec;

use super::network::{FlowState, Network, Slippage};
use crate::error::{Error, Result};

const MAX_ITER: usize = 20_000;
const KKT_RTOL: f64 = 1e-6;
const SUPPORT_TOL: f64 = 1e-9;

/// First-order optimality certificate for a simplex allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// `dW / d alpha_p` for each path.
    pub marginals: Vec<f64>,
    /// Relative spread of marginals over used paths.
    pub support_spread: f64,
    /// Largest relative excess of an unused path's marginal over the best used one.
    pub unused_excess: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalRoute {
    pub alpha: Vec<f64>,
    pub flow: FlowState,
    pub total: f64,
    pub iterations: usize,
    pub kkt: KktReport,
}

/// Euclidean projection onto `{x >= 0, sum x = total}`, with the sum made exact.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - total) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    let residual = total - x.iter().sum::<f64>();
    if let Some(i) = (0..x.len()).max_by(|&a, &b| x[a].total_cmp(&x[b])) {
        x[i] = (x[i] + residual).max(0.0);
    }
    x
}

struct Objective<'a> {
    net: &'a Network,
    attack: Option<&'a Slippage>,
    step: f64,
}

impl Objective<'_> {
    fn value(&self, alpha: &[f64]) -> Result<f64> {
        self.net.output(alpha, self.attack)
    }

    /// Partial derivatives by finite differences; one-sided near the boundary.
    fn gradient(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        let h = self.step;
        let mut x = alpha.to_vec();
        let mut grad = vec![0.0; alpha.len()];
        for p in 0..alpha.len() {
            let a = alpha[p];
            let at = |x: &mut Vec<f64>, v: f64| -> Result<f64> {
                x[p] = v;
                self.value(x)
            };
            grad[p] = if a > h {
                (at(&mut x, a + h)? - at(&mut x, a - h)?) / (2.0 * h)
            } else {
                let f0 = at(&mut x, a)?;
                (-3.0 * f0 + 4.0 * at(&mut x, a + h)? - at(&mut x, a + 2.0 * h)?) / (2.0 * h)
            };
            x[p] = a;
        }
        Ok(grad)
    }
}

/// First-order check: equal marginals on used paths, none higher off support.
pub fn kkt_report(
    net: &Network,
    alpha: &[f64],
    total: f64,
    attack: Option<&Slippage>,
) -> Result<KktReport> {
    let obj = Objective { net, attack, step: 1e-6 * total };
    let marginals = obj.gradient(alpha)?;
    let used: Vec<usize> = (0..alpha.len()).filter(|&p| alpha[p] > SUPPORT_TOL * total).collect();
    let hi = used.iter().map(|&p| marginals[p]).fold(f64::NEG_INFINITY, f64::max);
    let lo = used.iter().map(|&p| marginals[p]).fold(f64::INFINITY, f64::min);
    let support_spread = (hi - lo) / hi.abs();
    let unused_excess = (0..alpha.len())
        .filter(|p| !used.contains(p))
        .map(|p| (marginals[p] - hi) / hi.abs())
        .fold(0.0, f64::max);
    let satisfied = support_spread <= KKT_RTOL && unused_excess <= KKT_RTOL;
    Ok(KktReport { marginals, support_spread, unused_excess, satisfied })
}

fn ascend(obj: &Objective, start: Vec<f64>, total: f64) -> Result<(Vec<f64>, f64, usize)> {
    let mut x = start;
    let mut fx = obj.value(&x)?;
    let mut step = 0.0;
    for it in 0..MAX_ITER {
        let grad = obj.gradient(&x)?;
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax == 0.0 || !gmax.is_finite() {
            return Ok((x, fx, it));
        }
        if step == 0.0 {
            step = total / gmax;
        }
        // Armijo backtracking along the projection arc.
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
            let y = project_simplex(&trial, total);
            let ascent: f64 = y.iter().zip(&x).zip(&grad).map(|((yi, xi), g)| g * (yi - xi)).sum();
            let fy = obj.value(&y)?;
            if fy >= fx + 1e-4 * ascent && fy > fx {
                accepted = Some((y, fy));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((y, fy)) => {
                let moved = y.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                x = y;
                fx = fy;
                step *= 2.0;
                if moved <= 1e-15 * total {
                    return Ok((x, fx, it + 1));
                }
            }
            None => return Ok((x, fx, it + 1)),
        }
    }
    Err(Error::ConvergenceFailure { iterations: MAX_ITER })
}

/// Allocation of `total` across the network's paths that maximises total
/// output. Restarts from the uniform split and from every single-path vertex.
pub fn optimal_route(net: &Network, total: f64, attack: Option<&Slippage>) -> Result<OptimalRoute> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidParameter("routed amount must be positive"));
    }
    let np = net.paths().len();
    let obj = Objective { net, attack, step: 1e-6 * total };
    let mut starts = vec![vec![total / np as f64; np]];
    for p in 0..np {
        let mut v = vec![0.0; np];
        v[p] = total;
        starts.push(v);
    }
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    let mut iterations = 0;
    for s in starts {
        let (x, fx, it) = ascend(&obj, s, total)?;
        iterations += it;
        if best.as_ref().is_none_or(|b| fx > b.1) {
            best = Some((x, fx, it));
        }
    }
    let (alpha, _, _) = best.expect("at least one start");
    let flow = net.evaluate(&alpha, attack)?;
    let kkt = kkt_report(net, &alpha, total, attack)?;
    Ok(OptimalRoute { total: flow.total_output(), alpha, flow, iterations, kkt })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_feasible_and_idempotent() {
        let x = project_simplex(&[0.7, -0.3, 0.9], 1.0);
        assert!(x.iter().all(|v| *v >= 0.0));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(project_simplex(&x, 1.0), x);
        assert_eq!(project_simplex(&[0.25, 0.75], 1.0), vec![0.25, 0.75]);
    }
}
