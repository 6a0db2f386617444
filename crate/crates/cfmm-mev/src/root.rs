//! Bracketed bisection.

use crate::error::{Error, Result};

/// Termination settings for [`bisect`].
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    /// Stop once the bracket is narrower than `rtol * max(|lo|, |hi|) + atol`.
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection { rtol: 4.0 * f64::EPSILON, atol: 0.0, max_iter: 400 }
    }
}

/// Finds a root of `f` in `[lo, hi]`, given that `f(lo)` and `f(hi)` differ in sign.
///
/// Iterates until the tolerance is met or the bracket can no longer be split
/// in floating point. Returns `Error::NoSolution` without a sign change.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, opts: Bisection) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi)?;
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoSolution);
    }
    for _ in 0..opts.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= opts.rtol * lo.abs().max(hi.abs()) + opts.atol {
            return Ok(lo + 0.5 * (hi - lo));
        }
    }
    Err(Error::ConvergenceFailure { iterations: opts.max_iter })
}
