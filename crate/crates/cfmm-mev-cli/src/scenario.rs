//! JSON scenario files and the built-in defaults for each command.
//!
//! Every section is optional. Missing sections take the defaults of the
//! command being run, so an empty object `{}` reproduces the stock example.

use std::collections::BTreeMap;
use std::path::Path;

use cfmm_mev::reorder::{Magnitude, PoolTemplate, TradeDistribution};
use cfmm_mev::routing::{Network, TokenGraph};
use cfmm_mev::{Cfmm, CfmmKind, EdgeFn, PowerEdge};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::grid::{check_increasing, parse_grid, DEFAULT_ETA_GRID};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub cfmms: Vec<CfmmSpec>,
    pub graph: Option<GraphSpec>,
    pub trade: TradeSpec,
    pub sequence: SequenceSpec,
    pub mc: McSpec,
    pub bounds: BoundsSpec,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfmmSpec {
    pub id: String,
    #[serde(flatten)]
    pub edge: EdgeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeSpec {
    ConstantProduct { reserves: [f64; 2] },
    ConstantSum { rate: f64, reserves: [f64; 2] },
    WeightedProduct { weight: f64, reserves: [f64; 2] },
    /// `coef * x^exponent`, an exchange function without reserves.
    Power { coef: f64, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub source: String,
    pub sink: String,
    pub edges: Vec<EdgeRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRef {
    pub from: String,
    pub to: String,
    pub cfmm: String,
    #[serde(default)]
    pub attacked: bool,
}

/// A sweep grid: either a `kind:...` string or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Spec(String),
    Values(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Spec(s) => parse_grid(s),
            GridSpec::Values(v) => {
                check_increasing(v).map_err(CliError::Scenario)?;
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TradeSpec {
    /// Trade size, or the amount routed through a network.
    pub amount: f64,
    pub eta: f64,
    pub eta_grid: GridSpec,
    /// Pool used by single-pool commands; defaults to the first reserve-backed entry.
    pub pool: Option<String>,
}

impl Default for TradeSpec {
    fn default() -> Self {
        TradeSpec { amount: 1.0, eta: 0.1, eta_grid: GridSpec::Spec(DEFAULT_ETA_GRID.into()), pool: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeSpec {
    Constant(f64),
    Uniform([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceSpec {
    pub n_values: Vec<usize>,
    pub magnitude: MagnitudeSpec,
    /// Alternate buys and sells, starting with a buy.
    pub alternating: bool,
    pub eta: f64,
    pub pool: PoolTemplateSpec,
}

impl Default for SequenceSpec {
    fn default() -> Self {
        SequenceSpec {
            n_values: vec![4, 8, 16, 32, 64, 128, 256],
            magnitude: MagnitudeSpec::Uniform([0.5, 1.5]),
            alternating: true,
            eta: 0.05,
            pool: PoolTemplateSpec::default(),
        }
    }
}

/// Pool sized from the sequence: `reserves_in = depth * sum |delta|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolTemplateSpec {
    pub kind: PoolKindSpec,
    pub depth: f64,
    pub price: f64,
}

impl Default for PoolTemplateSpec {
    fn default() -> Self {
        PoolTemplateSpec { kind: PoolKindSpec::ConstantProduct, depth: 100.0, price: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKindSpec {
    ConstantProduct,
    ConstantSum { rate: f64 },
    WeightedProduct { weight: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSpec {
    /// Permutations per estimate; defaults to 500.
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSpec {
    pub deltas: GridSpec,
    /// Upper end of the curvature interval; defaults to the largest delta.
    pub interval: Option<f64>,
    pub grid_points: usize,
}

impl Default for BoundsSpec {
    fn default() -> Self {
        BoundsSpec { deltas: GridSpec::Spec("list:0.25,0.5,1,2,4".into()), interval: None, grid_points: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
}

pub const DEFAULT_K: usize = 500;
pub const DEFAULT_SEED: u64 = 7;

fn cfmm(id: &str, edge: EdgeSpec) -> CfmmSpec {
    CfmmSpec { id: id.into(), edge }
}

fn edge(from: &str, to: &str, id: &str, attacked: bool) -> EdgeRef {
    EdgeRef { from: from.into(), to: to.into(), cfmm: id.into(), attacked }
}

impl Scenario {
    /// Two parallel pools: an attacked constant-product pool with reserves
    /// `(1, 2)` next to a rate-one constant-sum pool, one unit routed.
    pub fn pigou() -> Self {
        Scenario {
            cfmms: vec![
                cfmm("cfmm1", EdgeSpec::ConstantProduct { reserves: [1.0, 2.0] }),
                cfmm("cfmm2", EdgeSpec::ConstantSum { rate: 1.0, reserves: [1e3, 1e3] }),
            ],
            graph: Some(GraphSpec {
                source: "A".into(),
                sink: "B".into(),
                edges: vec![edge("A", "B", "cfmm1", true), edge("A", "B", "cfmm2", false)],
            }),
            ..Scenario::default()
        }
    }

    /// Diamond with square-root and linear legs and an attacked
    /// constant-product shortcut between the two middle tokens.
    pub fn braess() -> Self {
        let sqrt = EdgeSpec::Power { coef: 1.0, exponent: 0.5 };
        let linear = EdgeSpec::Power { coef: 1.0, exponent: 1.0 };
        Scenario {
            cfmms: vec![
                cfmm("sqrt", sqrt),
                cfmm("linear", linear),
                cfmm("middle", EdgeSpec::ConstantProduct { reserves: [1.0, 2.0] }),
            ],
            graph: Some(GraphSpec {
                source: "A".into(),
                sink: "B".into(),
                edges: vec![
                    edge("A", "C", "sqrt", false),
                    edge("C", "B", "linear", false),
                    edge("A", "D", "linear", false),
                    edge("D", "B", "sqrt", false),
                    edge("C", "D", "middle", true),
                ],
            }),
            ..Scenario::default()
        }
    }

    /// Constant-product pool with reserves `(1, 2)` and a unit trade at 10% slippage.
    pub fn sandwich() -> Self {
        Scenario {
            cfmms: vec![cfmm("pool", EdgeSpec::ConstantProduct { reserves: [1.0, 2.0] })],
            ..Scenario::default()
        }
    }

    /// Deep constant-product pool for the bound sweep.
    pub fn bounds() -> Self {
        Scenario {
            cfmms: vec![cfmm("pool", EdgeSpec::ConstantProduct { reserves: [100.0, 100.0] })],
            ..Scenario::default()
        }
    }

    pub fn reorder() -> Self {
        Scenario { mc: McSpec { k: Some(DEFAULT_K), seed: Some(DEFAULT_SEED) }, ..Scenario::default() }
    }

    pub fn builtin(command: Command) -> Self {
        match command {
            Command::Pigou | Command::Route => Scenario::pigou(),
            Command::Braess => Scenario::braess(),
            Command::Sandwich => Scenario::sandwich(),
            Command::Bounds => Scenario::bounds(),
            Command::Reorder => Scenario::reorder(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::scenario(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::scenario(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    /// Fills the pools and graph from the command's defaults when the file has none.
    pub fn with_defaults_for(mut self, command: Command) -> Self {
        if self.cfmms.is_empty() && self.graph.is_none() {
            let base = Scenario::builtin(command);
            self.cfmms = base.cfmms;
            self.graph = base.graph;
        }
        self
    }

    fn edge_fns(&self) -> Result<BTreeMap<&str, EdgeFn>> {
        let mut map = BTreeMap::new();
        for c in &self.cfmms {
            let f = build_edge(&c.edge).map_err(|e| CliError::scenario(format!("cfmm `{}`: {e}", c.id)))?;
            if map.insert(c.id.as_str(), f).is_some() {
                return Err(CliError::scenario(format!("duplicate cfmm id `{}`", c.id)));
            }
        }
        Ok(map)
    }

    /// Builds the routing network, keeping only edges accepted by `keep`.
    pub fn network_filtered(&self, keep: impl Fn(&EdgeRef) -> bool) -> Result<Network> {
        let graph = self.graph.as_ref().ok_or_else(|| CliError::scenario("scenario has no graph"))?;
        let fns = self.edge_fns()?;
        let mut g = TokenGraph::new();
        for e in graph.edges.iter().filter(|e| keep(e)) {
            let f = fns
                .get(e.cfmm.as_str())
                .ok_or_else(|| CliError::scenario(format!("edge references unknown cfmm `{}`", e.cfmm)))?;
            g.add_edge(&e.from, &e.to, *f, e.attacked)
                .map_err(|err| CliError::scenario(format!("edge {} -> {}: {err}", e.from, e.to)))?;
        }
        Network::new(g, &graph.source, &graph.sink).map_err(|e| CliError::scenario(format!("graph: {e}")))
    }

    pub fn network(&self) -> Result<Network> {
        self.network_filtered(|_| true)
    }

    /// The pool named by `trade.pool`, or the first reserve-backed entry.
    pub fn pool(&self) -> Result<Cfmm> {
        let fns = self.edge_fns()?;
        let found = match &self.trade.pool {
            Some(id) => fns
                .get(id.as_str())
                .copied()
                .ok_or_else(|| CliError::scenario(format!("unknown pool `{id}`")))?,
            None => self
                .cfmms
                .iter()
                .map(|c| fns[c.id.as_str()])
                .find(|f| matches!(f, EdgeFn::Pool(_)))
                .ok_or_else(|| CliError::scenario("scenario has no reserve-backed pool"))?,
        };
        match found {
            EdgeFn::Pool(p) => Ok(p),
            EdgeFn::Power(_) => Err(CliError::scenario("single-pool commands need a reserve-backed pool")),
        }
    }

    pub fn eta_grid(&self) -> Result<Vec<f64>> {
        let grid = self.trade.eta_grid.values()?;
        if grid.iter().any(|e| !(0.0..1.0).contains(e)) {
            return Err(CliError::scenario("slippage grid must lie in [0, 1)"));
        }
        Ok(grid)
    }

    pub fn amount(&self) -> Result<f64> {
        let a = self.trade.amount;
        if !(a.is_finite() && a > 0.0) {
            return Err(CliError::scenario("trade amount must be positive"));
        }
        Ok(a)
    }

    pub fn seed(&self) -> Result<u64> {
        self.mc.seed.ok_or_else(|| CliError::scenario("stochastic runs need a seed (mc.seed or --seed)"))
    }

    pub fn samples(&self) -> Result<usize> {
        match self.mc.k.unwrap_or(DEFAULT_K) {
            0 => Err(CliError::scenario("mc.k must be positive")),
            k => Ok(k),
        }
    }

    pub fn n_values(&self) -> Result<Vec<usize>> {
        let n = &self.sequence.n_values;
        if n.len() < 2 || n.windows(2).any(|w| w[0] >= w[1]) || n[0] == 0 {
            return Err(CliError::scenario("sequence.n_values needs two or more increasing positive sizes"));
        }
        Ok(n.clone())
    }

    pub fn distribution(&self) -> Result<TradeDistribution> {
        let s = &self.sequence;
        let magnitude = match s.magnitude {
            MagnitudeSpec::Constant(d) if d.is_finite() && d > 0.0 => Magnitude::Constant(d),
            MagnitudeSpec::Uniform([lo, hi]) if lo > 0.0 && lo <= hi && hi.is_finite() => {
                Magnitude::Uniform { lo, hi }
            }
            _ => return Err(CliError::scenario("sequence magnitudes must be positive and finite")),
        };
        if !(0.0..1.0).contains(&s.eta) {
            return Err(CliError::scenario("sequence.eta must lie in [0, 1)"));
        }
        Ok(TradeDistribution { magnitude, alternating: s.alternating, eta: s.eta })
    }

    pub fn pool_template(&self) -> Result<PoolTemplate> {
        let p = &self.sequence.pool;
        if !(p.depth > 0.0 && p.depth.is_finite() && p.price > 0.0 && p.price.is_finite()) {
            return Err(CliError::scenario("sequence pool depth and price must be positive"));
        }
        let kind = match p.kind {
            PoolKindSpec::ConstantProduct => CfmmKind::ConstantProduct,
            PoolKindSpec::ConstantSum { rate } => CfmmKind::ConstantSum { rate },
            PoolKindSpec::WeightedProduct { weight } => CfmmKind::WeightedProduct { weight },
        };
        Ok(PoolTemplate { kind, depth: p.depth, price: p.price })
    }

    pub fn bound_deltas(&self) -> Result<Vec<f64>> {
        let d = self.bounds.deltas.values()?;
        if d[0] <= 0.0 {
            return Err(CliError::scenario("bound sweep deltas must be positive"));
        }
        Ok(d)
    }
}

fn build_edge(spec: &EdgeSpec) -> cfmm_mev::Result<EdgeFn> {
    Ok(match *spec {
        EdgeSpec::ConstantProduct { reserves: [r, rp] } => Cfmm::constant_product(r, rp)?.into(),
        EdgeSpec::ConstantSum { rate, reserves: [r, rp] } => Cfmm::constant_sum(rate, r, rp)?.into(),
        EdgeSpec::WeightedProduct { weight, reserves: [r, rp] } => {
            Cfmm::weighted_product(weight, r, rp)?.into()
        }
        EdgeSpec::Power { coef, exponent } => PowerEdge::new(coef, exponent)?.into(),
    })
}
