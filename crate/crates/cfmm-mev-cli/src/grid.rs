//! Sweep grids written as `log:lo:hi:n`, `lin:lo:hi:n` or `list:a,b,c`.

use crate::error::{CliError, Result};

/// Default slippage sweep: 50 log-spaced points on `[1e-4, 0.9]`.
pub const DEFAULT_ETA_GRID: &str = "log:1e-4:0.9:50";

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| CliError::scenario(format!("grid `{spec}`: {why}"));
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("missing `kind:` prefix"))?;
    let values = match kind {
        "list" => rest
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad("unparsable value")))
            .collect::<Result<Vec<_>>>()?,
        "lin" | "log" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let [lo, hi, n] = parts[..] else {
                return Err(bad("expected lo:hi:n"));
            };
            let lo: f64 = lo.parse().map_err(|_| bad("unparsable lower end"))?;
            let hi: f64 = hi.parse().map_err(|_| bad("unparsable upper end"))?;
            let n: usize = n.parse().map_err(|_| bad("unparsable point count"))?;
            if n == 0 {
                return Err(bad("point count must be positive"));
            }
            if kind == "log" && !(lo > 0.0) {
                return Err(bad("log grids need a positive lower end"));
            }
            spaced(lo, hi, n, kind == "log")
        }
        _ => return Err(bad("kind must be log, lin or list")),
    };
    check_increasing(&values).map_err(|why| bad(&why))?;
    Ok(values)
}

fn spaced(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    (0..n)
        .map(|i| {
            if i == 0 {
                return lo;
            }
            if i == n - 1 {
                return hi;
            }
            let t = a + (b - a) * i as f64 / (n - 1) as f64;
            if log {
                t.exp()
            } else {
                t
            }
        })
        .collect()
}

/// Nonempty, finite and strictly increasing.
pub fn check_increasing(values: &[f64]) -> std::result::Result<(), String> {
    if values.is_empty() {
        return Err("grid is empty".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_both_ends() {
        let g = parse_grid(DEFAULT_ETA_GRID).unwrap();
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[49], 0.9);
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-12);
    }

    #[test]
    fn lin_and_list() {
        assert_eq!(parse_grid("lin:0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("list:0, 0.5,0.7").unwrap(), vec![0.0, 0.5, 0.7]);
    }

    #[test]
    fn rejects_malformed_grids() {
        for bad in ["", "log:0:1:3", "lin:1:0:3", "list:0.1,0.1", "cube:0:1:2", "lin:0:1", "list:a"] {
            assert!(matches!(parse_grid(bad), Err(CliError::Scenario(_))), "{bad}");
        }
    }
}
