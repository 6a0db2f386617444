//! Routing across networks of CFMMs.
//!
//! Users split an amount of a source token across every source-to-sink path.
//! Flow meeting on a shared edge is pooled and paid out pro rata. An attacker
//! may sandwich selected edges, which changes both the welfare-optimal split
//! and the split selfish users settle into.

mod graph;
mod network;
mod optimal;
mod path;
mod poa;
mod selfish;

pub use graph::{enumerate_paths, Edge, Path, TokenGraph};
pub use network::{FlowState, Network, Slippage};
pub use optimal::{kkt_report, optimal_route, project_simplex, KktReport, OptimalRoute};
pub use path::{path_sandwich, path_sandwich_bounds, Chain, PathBounds, PathSandwich};
pub use poa::{poa_smoothness_bound, welfare_and_poa, SmoothnessBound, Welfare};
pub use selfish::{selfish_route, Equilibrium};

use crate::cfmm::{Cfmm, PowerEdge};
use crate::error::Result;

/// Two parallel pools from `A` to `B`: an attacked constant-product pool with
/// reserves `(1, 2)` and a constant-sum pool at rate one.
pub fn pigou() -> Result<Network> {
    let mut g = TokenGraph::new();
    g.add_edge("A", "B", Cfmm::constant_product(1.0, 2.0)?, true)?;
    g.add_edge("A", "B", Cfmm::constant_sum(1.0, 1e3, 1e3)?, false)?;
    Network::new(g, "A", "B")
}

/// Four-edge diamond `A -> C -> B`, `A -> D -> B` with square-root and linear
/// legs, plus an attacked constant-product shortcut `C -> D` with reserves `(1, 2)`.
///
/// Without `shortcut`, only the two outer paths remain.
pub fn braess(shortcut: bool) -> Result<Network> {
    let mut g = TokenGraph::new();
    g.add_edge("A", "C", PowerEdge::sqrt(), false)?;
    g.add_edge("C", "B", PowerEdge::identity(), false)?;
    g.add_edge("A", "D", PowerEdge::identity(), false)?;
    g.add_edge("D", "B", PowerEdge::sqrt(), false)?;
    if shortcut {
        g.add_edge("C", "D", Cfmm::constant_product(1.0, 2.0)?, true)?;
    }
    Network::new(g, "A", "B")
}
