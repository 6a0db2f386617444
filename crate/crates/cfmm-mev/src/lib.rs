//! Sandwich attacks on constant function market makers.
//!
//! The crate is `no_std` (with `alloc`) and covers four layers:
//!
//! * [`cfmm`]: exchange functions, rates, inverses and curvature constants.
//! * [`sandwich`]: optimal single-trade attacks, attacker profit, analytic
//!   bound evaluators and locality checks.
//! * [`routing`]: CFMM networks, optimal and selfish routing, path attacks
//!   and price of anarchy.
//! * [`reorder`]: sequential attacks, trade drifts and the cost of feudalism
//!   under uniformly random reorderings.
//!
//! Every amount is an `f64` and every trade is feeless.

#![no_std]
// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cfmm;
pub mod error;
mod math;
pub mod reorder;
pub mod root;
pub mod routing;
pub mod sandwich;

pub use cfmm::{Cfmm, CfmmKind, CurvatureBounds, EdgeFn, ExchangeFunction, PowerEdge};
pub use error::{Error, Result};
pub use sandwich::{SandwichResult, Trade};
