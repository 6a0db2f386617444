//! Scenario loading, experiment drivers and CSV output for the `cfmm-mev` binary.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod drivers;
pub mod error;
pub mod grid;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use error::{CliError, Result};
pub use scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sandwich one trade on one pool.
    Sandwich,
    /// Compare simulated sandwiches with their analytic bounds over a (delta, eta) grid.
    Bounds,
    /// Slippage sweep on the two-pool network.
    Pigou,
    /// Slippage sweep on the diamond network with an attacked shortcut.
    Braess,
    /// Optimal and selfish splits at one slippage tolerance.
    Route,
    /// Cost of reordering sandwiched trades as the block grows.
    Reorder,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "cfmm-mev", version, about = "Sandwich attack experiments on CFMM networks")]
pub struct Cli {
    /// JSON scenario; missing sections take the command's defaults.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Seed for stochastic commands, overriding `mc.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding `output.dir` (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Slippage grid: `log:lo:hi:n`, `lin:lo:hi:n` or `list:a,b,...`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    /// The scenario after defaults and command-line overrides.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::load(path)?.with_defaults_for(self.command),
            None => Scenario::builtin(self.command),
        };
        if let Some(seed) = self.seed {
            s.mc.seed = Some(seed);
        }
        if let Some(grid) = &self.grid {
            s.trade.eta_grid = scenario::GridSpec::Spec(grid.clone());
        }
        Ok(s)
    }

    pub fn out_dir(&self, s: &Scenario) -> PathBuf {
        self.out
            .clone()
            .or_else(|| s.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Writes `rows` with a header row to `dir/name`.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Runs the selected command and returns the files written and a one-line summary.
pub fn run(cli: &Cli) -> Result<(Vec<PathBuf>, String)> {
    let s = cli.scenario()?;
    let dir = cli.out_dir(&s);
    match cli.command {
        Command::Pigou => {
            let rows = drivers::run_pigou_sweep(&s)?;
            let max_poa = rows.iter().map(|r| r.poa).fold(1.0, f64::max);
            Ok((vec![write_csv(&dir, "pigou.csv", &rows)?], format!("{} rows, max poa {max_poa:.6}", rows.len())))
        }
        Command::Braess => {
            let (base, rows) = drivers::run_braess_sweep(&s)?;
            let files = vec![write_csv(&dir, "braess.csv", &rows)?, write_csv(&dir, "braess_baseline.csv", &[base])?];
            Ok((files, format!("{} rows, baseline output {:.6}", rows.len(), base.eq_out)))
        }
        Command::Route => {
            let (w, rows) = drivers::run_route(&s)?;
            let msg = format!("optimal {:.6}, equilibrium {:.6}, poa {:.6}", w.optimum.total, w.equilibrium.total, w.poa);
            Ok((vec![write_csv(&dir, "route.csv", &rows)?], msg))
        }
        Command::Sandwich => {
            let row = drivers::run_sandwich(&s)?;
            let msg = format!("front-run {:.6}, back-run {:.6}, pnl {:.6}", row.delta_sand, row.delta_sand_prime, row.pnl);
            Ok((vec![write_csv(&dir, "sandwich.csv", &[row])?], msg))
        }
        Command::Bounds => {
            let (summary, rows) = drivers::run_bounds_report(&s)?;
            let files = vec![write_csv(&dir, "bounds.csv", &rows)?, write_bounds_summary(&dir, &summary)?];
            let v = summary.upper.violations + summary.lower.violations + summary.pnl.violations;
            Ok((files, format!("{} cells, {v} violations among checked bounds", summary.cells)))
        }
        Command::Reorder => {
            let out = drivers::run_reorder_study(&s)?;
            let files = vec![
                write_csv(&dir, "cof.csv", &out.rows)?,
                write_csv(&dir, "cof_fit.csv", &out.fits)?,
                write_csv(&dir, "cof_samples.csv", &out.samples)?,
            ];
            let (log, lin) = (out.study.log_fit.r2, out.study.linear_fit.r2);
            let msg = format!("log fit r2 {log:.4}, linear fit r2 {lin:.4}");
            Ok((files, msg))
        }
    }
}

#[derive(Serialize)]
struct SummaryRow {
    check: &'static str,
    checked: usize,
    violations: usize,
    skipped: usize,
}

fn write_bounds_summary(dir: &Path, s: &drivers::BoundsSummary) -> Result<PathBuf> {
    let rows: Vec<SummaryRow> = [("upper", s.upper), ("lower", s.lower), ("pnl", s.pnl)]
        .into_iter()
        .map(|(check, c)| SummaryRow { check, checked: c.checked, violations: c.violations, skipped: c.skipped })
        .collect();
    write_csv(dir, "bounds_summary.csv", &rows)
}
