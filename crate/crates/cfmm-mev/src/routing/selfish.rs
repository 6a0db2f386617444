//! Wardrop equilibria: every used path pays the same average price and no
//! unused path offers a better price to a marginal user.

use alloc::vec;
use alloc::vec::Vec;

use super::network::{FlowState, Network, Slippage};
use crate::error::{Error, Result};
use crate::root::{bisect, Bisection};

const PRICE_RTOL: f64 = 1e-8;
const ENTRY_RTOL: f64 = 1e-6;
const ENTRY_STEP: f64 = 1e-6;
/// Networks with at most this many paths get exhaustive support search.
const EXHAUSTIVE_PATHS: usize = 3;
const REPLICATOR_ITER: usize = 5_000;
const NEWTON_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub alpha: Vec<f64>,
    pub flow: FlowState,
    pub total: f64,
    /// Paths carrying flow, ascending.
    pub support: Vec<usize>,
    /// Common average price `output / input` on the support.
    pub price: f64,
    /// Per-path price: average on the support, marginal entry price elsewhere.
    pub prices: Vec<f64>,
}

struct Pricing<'a> {
    net: &'a Network,
    attack: Option<&'a Slippage>,
    total: f64,
}

impl Pricing<'_> {
    fn average(&self, alpha: &[f64], p: usize) -> Result<f64> {
        let out = self.net.evaluate(alpha, self.attack)?.path_outputs[p];
        Ok(out / alpha[p])
    }

    /// Price seen by a vanishing amount moved onto path `p` from the others.
    fn entry(&self, alpha: &[f64], p: usize) -> Result<f64> {
        let at = |eps: f64| -> Result<f64> {
            let rest: f64 = alpha.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, a)| a).sum();
            let scale = if rest > 0.0 { (rest - eps) / rest } else { 0.0 };
            let shifted: Vec<f64> =
                alpha.iter().enumerate().map(|(q, a)| if q == p { a + eps } else { a * scale }).collect();
            self.average(&shifted, p)
        };
        let eps = ENTRY_STEP * self.total;
        // Richardson extrapolation removes the first-order bias.
        Ok(2.0 * at(eps)? - at(2.0 * eps)?)
    }

    /// Sets `alpha` on `support` so their average prices agree, carrying the
    /// whole amount. Returns `false` if no interior split exists.
    fn equalise(&self, alpha: &mut [f64], support: &[usize]) -> Result<bool> {
        match *support {
            [p] => {
                alpha[p] = self.total;
                Ok(true)
            }
            [p, q] => self.split_pair(alpha, p, q),
            _ => self.replicate(alpha, support),
        }
    }

    /// Bisection on the flow of `p` against `q`.
    fn split_pair(&self, alpha: &mut [f64], p: usize, q: usize) -> Result<bool> {
        let total = self.total;
        let mut gap = |t: f64| -> Result<f64> {
            alpha[p] = t;
            alpha[q] = total - t;
            Ok(self.average(alpha, p)? - self.average(alpha, q)?)
        };
        let edge = 1e-12 * total;
        if !(gap(edge)? > 0.0 && gap(total - edge)? < 0.0) {
            return Ok(false);
        }
        let opts = Bisection { rtol: 1e-15, atol: 0.0, max_iter: 200 };
        let t = bisect(&mut gap, edge, total - edge, opts)?;
        gap(t)?;
        Ok(true)
    }

    /// Damped replicator dynamics on `support` as a warm start, polished by
    /// Newton steps on the price equalities. Returns `false` when some path
    /// is driven to zero.
    fn replicate(&self, alpha: &mut [f64], support: &[usize]) -> Result<bool> {
        let floor = 1e-12 * self.total;
        for &p in support {
            alpha[p] = self.total / support.len() as f64;
        }
        for _ in 0..REPLICATOR_ITER {
            let flow = self.net.evaluate(alpha, self.attack)?;
            let mean = support.iter().map(|&p| flow.path_outputs[p]).sum::<f64>() / self.total;
            let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
            for &p in support {
                let price = flow.path_outputs[p] / alpha[p];
                hi = hi.max(price);
                lo = lo.min(price);
                alpha[p] *= 0.5 + 0.5 * price / mean;
            }
            let s: f64 = support.iter().map(|&p| alpha[p]).sum();
            for &p in support {
                alpha[p] *= self.total / s;
                if alpha[p] < floor {
                    return Ok(false);
                }
            }
            if hi - lo <= 0.01 * PRICE_RTOL * hi {
                return Ok(true);
            }
        }
        self.newton(alpha, support)
    }

    /// Price gaps `price(s_i) - price(s_0)` with `s_0` absorbing the remainder.
    fn gaps(&self, alpha: &[f64], support: &[usize]) -> Result<Vec<f64>> {
        let out = self.net.evaluate(alpha, self.attack)?.path_outputs;
        let price = |p: usize| out[p] / alpha[p];
        let base = price(support[0]);
        Ok(support[1..].iter().map(|&p| price(p) - base).collect())
    }

    fn newton(&self, alpha: &mut [f64], support: &[usize]) -> Result<bool> {
        let floor = 1e-12 * self.total;
        let (head, free) = (support[0], &support[1..]);
        let set = |alpha: &mut [f64], x: &[f64]| {
            for (&p, &v) in free.iter().zip(x) {
                alpha[p] = v;
            }
            alpha[head] = self.total - x.iter().sum::<f64>();
        };
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut x: Vec<f64> = free.iter().map(|&p| alpha[p]).collect();
        let mut r = self.gaps(alpha, support)?;
        for _ in 0..NEWTON_ITER {
            let scale = self.average(alpha, head)?;
            if norm(&r) <= 0.01 * PRICE_RTOL * scale {
                return Ok(true);
            }
            let k = x.len();
            let mut jac = vec![vec![0.0; k]; k];
            for j in 0..k {
                let h = 1e-7 * x[j];
                let mut xh = x.clone();
                xh[j] += h;
                let mut trial = alpha.to_vec();
                set(&mut trial, &xh);
                let rh = self.gaps(&trial, support)?;
                for i in 0..k {
                    jac[i][j] = (rh[i] - r[i]) / h;
                }
            }
            let Some(step) = solve(jac, r.iter().map(|v| -v).collect()) else {
                return Ok(false);
            };
            let mut t = 1.0;
            loop {
                let xt: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + t * d).collect();
                let mut trial = alpha.to_vec();
                set(&mut trial, &xt);
                if support.iter().all(|&p| trial[p] > floor) {
                    let rt = self.gaps(&trial, support)?;
                    if norm(&rt) < norm(&r) {
                        x = xt;
                        r = rt;
                        alpha.copy_from_slice(&trial);
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-12 {
                    return Ok(false);
                }
            }
        }
        Ok(false)
    }

    /// Checks the Wardrop conditions for `alpha` and builds the result.
    fn certify(&self, alpha: Vec<f64>) -> Result<Option<Equilibrium>> {
        let support: Vec<usize> = (0..alpha.len()).filter(|&p| alpha[p] > 0.0).collect();
        let mut prices = vec![0.0; alpha.len()];
        for p in 0..alpha.len() {
            prices[p] = if alpha[p] > 0.0 { self.average(&alpha, p)? } else { self.entry(&alpha, p)? };
        }
        let hi = support.iter().map(|&p| prices[p]).fold(f64::NEG_INFINITY, f64::max);
        let lo = support.iter().map(|&p| prices[p]).fold(f64::INFINITY, f64::min);
        if !(hi - lo <= PRICE_RTOL * hi.abs()) {
            return Ok(None);
        }
        let blocked = (0..alpha.len())
            .filter(|p| !support.contains(p))
            .all(|p| prices[p] <= hi * (1.0 + ENTRY_RTOL));
        if !blocked {
            return Ok(None);
        }
        let flow = self.net.evaluate(&alpha, self.attack)?;
        Ok(Some(Equilibrium { total: flow.total_output(), alpha, flow, support, price: hi, prices }))
    }
}

/// Gaussian elimination with partial pivoting; `None` for a singular matrix.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if !(a[piv][c].abs() > 0.0) {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        let bc = b[c];
        let (upper, lower) = a.split_at_mut(c + 1);
        let pivot = &upper[c];
        for (row, br) in lower.iter_mut().zip(&mut b[c + 1..]) {
            let m = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= m * p;
            }
            *br -= m * bc;
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Supports of `0..n` ordered by size, then lexicographically.
fn supports(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Selfish-routing equilibrium of `total` units from source to sink.
///
/// Small networks try every support in order of size and return the first
/// that certifies. Larger ones run replicator dynamics on all paths.
pub fn selfish_route(net: &Network, total: f64, attack: Option<&Slippage>) -> Result<Equilibrium> {
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidParameter("routed amount must be positive"));
    }
    let np = net.paths().len();
    let pricing = Pricing { net, attack, total };
    let candidates = if np > EXHAUSTIVE_PATHS { vec![(0..np).collect()] } else { supports(np) };
    for support in candidates {
        let mut alpha = vec![0.0; np];
        if !pricing.equalise(&mut alpha, &support)? {
            continue;
        }
        if let Some(eq) = pricing.certify(alpha)? {
            return Ok(eq);
        }
    }
    Err(Error::ConvergenceFailure { iterations: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        let x = solve(vec![vec![0.0, 2.0], vec![1.0, 1.0]], vec![4.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]).is_none());
    }

    #[test]
    fn supports_are_ordered() {
        let s = supports(3);
        assert_eq!(s[0], vec![0]);
        assert_eq!(s[3], vec![0, 1]);
        assert_eq!(s[6], vec![0, 1, 2]);
    }
}
