use alloc::vec;
use alloc::vec::Vec;

use super::graph::{enumerate_paths, topological_order, Path, TokenGraph};
use crate::cfmm::ExchangeFunction;
use crate::error::{Error, Result};
use crate::sandwich::{sandwich_pnl, Trade};

/// Slippage limits for routed users, uniform or one per path.
#[derive(Debug, Clone, PartialEq)]
pub enum Slippage {
    Uniform(f64),
    PerPath(Vec<f64>),
}

impl Slippage {
    pub fn for_path(&self, p: usize) -> f64 {
        match self {
            Slippage::Uniform(eta) => *eta,
            Slippage::PerPath(v) => v[p],
        }
    }

    fn validate(&self, paths: usize) -> Result<()> {
        let ok = |e: &f64| (0.0..1.0).contains(e);
        match self {
            Slippage::Uniform(e) if ok(e) => Ok(()),
            Slippage::PerPath(v) if v.len() == paths && v.iter().all(ok) => Ok(()),
            _ => Err(Error::InvalidParameter("slippage limits must lie in [0, 1), one per path")),
        }
    }
}

/// Flows produced by one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    /// Output credited to each path.
    pub path_outputs: Vec<f64>,
    /// Inflow of each path into each of its edges, in path order.
    pub path_edge_inputs: Vec<Vec<f64>>,
    pub edge_inputs: Vec<f64>,
    pub edge_outputs: Vec<f64>,
    /// Attacker profit per edge, in the edge's input token.
    pub edge_pnl: Vec<f64>,
}

impl FlowState {
    pub fn total_output(&self) -> f64 {
        self.path_outputs.iter().sum()
    }

    pub fn attacker_pnl(&self) -> f64 {
        self.edge_pnl.iter().sum()
    }
}

/// A token graph with a fixed source, sink and path set.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    graph: TokenGraph,
    source: usize,
    sink: usize,
    paths: Vec<Path>,
    /// Edges in an order where every edge follows all edges into its tail.
    order: Vec<usize>,
    /// `(path, position)` pairs using each edge.
    uses: Vec<Vec<(usize, usize)>>,
}

impl Network {
    pub fn new(graph: TokenGraph, source: &str, sink: &str) -> Result<Self> {
        let s = graph.token(source).ok_or(Error::InvalidParameter("unknown source token"))?;
        let t = graph.token(sink).ok_or(Error::InvalidParameter("unknown sink token"))?;
        let paths = enumerate_paths(&graph, s, t)?;
        let mut uses = vec![Vec::new(); graph.edges().len()];
        for (p, path) in paths.iter().enumerate() {
            for (k, &e) in path.iter().enumerate() {
                uses[e].push((p, k));
            }
        }
        let relevant: Vec<bool> = (0..graph.tokens().len())
            .map(|v| paths.iter().flatten().any(|&e| graph.edges()[e].from == v || graph.edges()[e].to == v))
            .collect();
        let topo = topological_order(&graph, &relevant).ok_or(Error::CyclicGraph)?;
        let edges = graph.edges();
        let order = topo
            .iter()
            .flat_map(|&v| (0..edges.len()).filter(move |&e| edges[e].from == v))
            .filter(|&e| !uses[e].is_empty())
            .collect();
        Ok(Network { graph, source: s, sink: t, paths, order, uses })
    }

    pub fn graph(&self) -> &TokenGraph {
        &self.graph
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Pushes the allocation `alpha` through the network.
    ///
    /// Flow on a shared edge is pooled and its output split pro rata. With
    /// `attack` set, every attacked strictly concave edge is sandwiched at the
    /// tightest slippage limit among the paths crossing it, so it delivers
    /// `(1 - eta) G(input)`.
    pub fn evaluate(&self, alpha: &[f64], attack: Option<&Slippage>) -> Result<FlowState> {
        let np = self.paths.len();
        if alpha.len() != np || alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidParameter("allocation must be nonnegative, one entry per path"));
        }
        if let Some(s) = attack {
            s.validate(np)?;
        }
        let ne = self.graph.edges().len();
        let mut path_edge_inputs: Vec<Vec<f64>> =
            self.paths.iter().map(|p| vec![0.0; p.len()]).collect();
        for (p, a) in alpha.iter().enumerate() {
            path_edge_inputs[p][0] = *a;
        }
        let mut path_outputs = vec![0.0; np];
        let mut edge_inputs = vec![0.0; ne];
        let mut edge_outputs = vec![0.0; ne];
        let mut edge_pnl = vec![0.0; ne];

        for &e in &self.order {
            let edge = &self.graph.edges()[e];
            let input: f64 = self.uses[e].iter().map(|&(p, k)| path_edge_inputs[p][k]).sum();
            edge_inputs[e] = input;
            if input <= 0.0 {
                continue;
            }
            let quoted = edge.func.output(input)?;
            let eta = match attack {
                Some(s) if edge.attacked && edge.func.strictly_concave() => self.uses[e]
                    .iter()
                    .filter(|&&(p, k)| path_edge_inputs[p][k] > 0.0)
                    .map(|&(p, _)| s.for_path(p))
                    .fold(f64::INFINITY, f64::min),
                _ => 0.0,
            };
            let out = if eta > 0.0 {
                edge_pnl[e] = sandwich_pnl(&edge.func, &Trade { delta: input, eta })?;
                (1.0 - eta) * quoted
            } else {
                quoted
            };
            edge_outputs[e] = out;
            for &(p, k) in &self.uses[e] {
                let share = out * (path_edge_inputs[p][k] / input);
                if k + 1 < self.paths[p].len() {
                    path_edge_inputs[p][k + 1] = share;
                } else {
                    path_outputs[p] = share;
                }
            }
        }
        Ok(FlowState { path_outputs, path_edge_inputs, edge_inputs, edge_outputs, edge_pnl })
    }

    /// Total output of the allocation `alpha`.
    pub fn output(&self, alpha: &[f64], attack: Option<&Slippage>) -> Result<f64> {
        self.evaluate(alpha, attack).map(|f| f.total_output())
    }
}
