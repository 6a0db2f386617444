//! Cost of feudalism: how far a uniformly random ordering moves each trade's
//! attacker profit, worst trade against average trade.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::simulate_sequence;
use crate::cfmm::Cfmm;
use crate::error::{Error, Result};
use crate::sandwich::Trade;

/// Largest sequence enumerated exhaustively.
const MAX_EXACT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CofSample {
    /// Largest per-trade profit change against the submitted order.
    pub max_diff: f64,
    /// Mean per-trade profit change.
    pub mean_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CofEstimate {
    /// `numerator / denominator`.
    pub cof: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub n_permutations: usize,
    pub seed: u64,
    pub n_trades: usize,
    pub samples: Vec<CofSample>,
}

/// Profit changes when `trades` execute in the order `perm`.
///
/// Slot `j` executes trade `perm[j]`; differences are matched by trade identity.
/// Trades with identical size and limit are indistinguishable, so the `k`-th
/// such trade to execute is matched with the `k`-th in submitted order.
fn sample(trades: &[Trade], ctx: &Baseline, perm: &[usize]) -> Result<CofSample> {
    let ordered: Vec<Trade> = perm.iter().map(|&i| trades[i]).collect();
    let pnl = simulate_sequence(&ctx.pool, &ordered)?.pnl;
    let mut next = vec![0usize; trades.len()];
    let mut max_diff = 0.0f64;
    let mut sum = 0.0;
    for (slot, &i) in perm.iter().enumerate() {
        let class = ctx.class[i];
        let owner = ctx.members[class][next[class]];
        next[class] += 1;
        let d = (pnl[slot] - ctx.pnl[owner]).abs();
        max_diff = max_diff.max(d);
        sum += d;
    }
    Ok(CofSample { max_diff, mean_diff: sum / perm.len() as f64 })
}

/// Submitted-order profits and the grouping of interchangeable trades.
struct Baseline {
    pool: Cfmm,
    pnl: Vec<f64>,
    /// Index of each trade's class in `members`.
    class: Vec<usize>,
    /// Trade indices per class, ascending.
    members: Vec<Vec<usize>>,
}

impl Baseline {
    fn new(pool: &Cfmm, trades: &[Trade]) -> Result<Self> {
        let pnl = simulate_sequence(pool, trades)?.pnl;
        let mut class = Vec::with_capacity(trades.len());
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, t) in trades.iter().enumerate() {
            let same = |j: &usize| {
                let u = trades[members[*j][0]];
                u.delta.to_bits() == t.delta.to_bits() && u.eta.to_bits() == t.eta.to_bits()
            };
            match (0..members.len()).find(same) {
                Some(c) => {
                    members[c].push(i);
                    class.push(c);
                }
                None => {
                    class.push(members.len());
                    members.push(vec![i]);
                }
            }
        }
        Ok(Baseline { pool: *pool, pnl, class, members })
    }
}

fn summarise(samples: Vec<CofSample>, seed: u64, n_trades: usize) -> Result<CofEstimate> {
    let k = samples.len() as f64;
    let numerator = samples.iter().map(|s| s.max_diff).sum::<f64>() / k;
    let denominator = samples.iter().map(|s| s.mean_diff).sum::<f64>() / k;
    if !(denominator > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(CofEstimate {
        cof: numerator / denominator,
        numerator,
        denominator,
        n_permutations: samples.len(),
        seed,
        n_trades,
        samples,
    })
}

fn check(trades: &[Trade], k: usize) -> Result<()> {
    if trades.is_empty() {
        return Err(Error::InvalidParameter("reordering needs at least one trade"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("sample count must be positive"));
    }
    Ok(())
}

/// Permutation for sample `index`: a shuffle driven by its own ChaCha8 stream.
fn permutation(n: usize, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Monte Carlo estimate over `k` independent uniform permutations.
///
/// Sample `s` uses stream `s` of a ChaCha8 generator seeded with `seed`, so the
/// result is reproducible and independent of evaluation order.
pub fn cof_estimate(pool: &Cfmm, trades: &[Trade], k: usize, seed: u64) -> Result<CofEstimate> {
    check(trades, k)?;
    let base = Baseline::new(pool, trades)?;
    let samples = (0..k as u64)
        .map(|s| sample(trades, &base, &permutation(trades.len(), seed, s)))
        .collect::<Result<Vec<_>>>()?;
    summarise(samples, seed, trades.len())
}

/// Like [`cof_estimate`] but rejects repeated permutations; `k` may not exceed `n!`.
pub fn cof_estimate_without_replacement(
    pool: &Cfmm,
    trades: &[Trade],
    k: usize,
    seed: u64,
) -> Result<CofEstimate> {
    check(trades, k)?;
    let n = trades.len();
    if factorial(n).is_none_or(|f| k > f) {
        return Err(Error::InvalidParameter("more samples requested than permutations exist"));
    }
    let base = Baseline::new(pool, trades)?;
    let mut seen = BTreeSet::new();
    let mut samples = Vec::with_capacity(k);
    let mut draw = 0u64;
    while samples.len() < k {
        let perm = permutation(n, seed, draw);
        draw += 1;
        if seen.insert(perm.clone()) {
            samples.push(sample(trades, &base, &perm)?);
        }
    }
    summarise(samples, seed, n)
}

/// Exact value over all `n!` orderings, in lexicographic order. `seed` is reported as 0.
pub fn cof_exact(pool: &Cfmm, trades: &[Trade]) -> Result<CofEstimate> {
    check(trades, 1)?;
    let n = trades.len();
    if n > MAX_EXACT {
        return Err(Error::TooManyTrades { n, max: MAX_EXACT });
    }
    let base = Baseline::new(pool, trades)?;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut samples = Vec::new();
    loop {
        samples.push(sample(trades, &base, &perm)?);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    summarise(samples, 0, n)
}

fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, i| acc.checked_mul(i))
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_all_permutations() {
        let mut v = [0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(v, [3, 2, 1, 0]);
    }

    #[test]
    fn permutations_are_reproducible() {
        assert_eq!(permutation(16, 7, 3), permutation(16, 7, 3));
        assert_ne!(permutation(16, 7, 3), permutation(16, 7, 4));
    }
}
