use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cfmm::EdgeFn;
use crate::error::{Error, Result};

/// A directed edge trading token `from` for token `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub func: EdgeFn,
    /// Whether an attacker sandwiches flow through this edge.
    pub attacked: bool,
}

/// Sequence of edge indices from source to sink.
pub type Path = Vec<usize>;

/// Directed multigraph of tokens connected by exchange functions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TokenGraph {
    tokens: Vec<String>,
    edges: Vec<Edge>,
}

impl TokenGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `name`, inserting it if new.
    pub fn add_token(&mut self, name: &str) -> usize {
        match self.token(name) {
            Some(i) => i,
            None => {
                self.tokens.push(String::from(name));
                self.tokens.len() - 1
            }
        }
    }

    pub fn token(&self, name: &str) -> Option<usize> {
        self.tokens.iter().position(|t| t == name)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn add_edge(
        &mut self,
        from: &str,
        to: &str,
        func: impl Into<EdgeFn>,
        attacked: bool,
    ) -> Result<usize> {
        if from == to {
            return Err(Error::InvalidParameter("edge endpoints must differ"));
        }
        let from = self.add_token(from);
        let to = self.add_token(to);
        self.edges.push(Edge { from, to, func: func.into(), attacked });
        Ok(self.edges.len() - 1)
    }
}

/// All simple source-to-sink paths, in lexicographic order of edge indices.
///
/// Fails with `CyclicGraph` if any cycle lies on a source-to-sink route.
pub fn enumerate_paths(graph: &TokenGraph, source: usize, sink: usize) -> Result<Vec<Path>> {
    let n = graph.tokens.len();
    if source >= n || sink >= n {
        return Err(Error::InvalidParameter("unknown token"));
    }
    if source == sink {
        return Err(Error::InvalidParameter("source and sink must differ"));
    }
    let relevant = relevant_vertices(graph, source, sink);
    if !relevant[source] {
        return Err(Error::NoPath);
    }
    if has_cycle(graph, &relevant) {
        return Err(Error::CyclicGraph);
    }
    let mut paths = Vec::new();
    let mut stack = Vec::new();
    extend(graph, &relevant, source, sink, &mut stack, &mut paths);
    Ok(paths)
}

fn extend(
    graph: &TokenGraph,
    relevant: &[bool],
    at: usize,
    sink: usize,
    stack: &mut Path,
    out: &mut Vec<Path>,
) {
    if at == sink {
        out.push(stack.clone());
        return;
    }
    for (i, e) in graph.edges.iter().enumerate() {
        if e.from == at && relevant[e.to] {
            stack.push(i);
            extend(graph, relevant, e.to, sink, stack, out);
            stack.pop();
        }
    }
}

/// Vertices reachable from `source` that can also reach `sink`.
fn relevant_vertices(graph: &TokenGraph, source: usize, sink: usize) -> Vec<bool> {
    let n = graph.tokens.len();
    let reach = |start: usize, forward: bool| {
        let mut seen = vec![false; n];
        let mut todo = vec![start];
        seen[start] = true;
        while let Some(v) = todo.pop() {
            for e in &graph.edges {
                let (a, b) = if forward { (e.from, e.to) } else { (e.to, e.from) };
                if a == v && !seen[b] {
                    seen[b] = true;
                    todo.push(b);
                }
            }
        }
        seen
    };
    let fwd = reach(source, true);
    let bwd = reach(sink, false);
    fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect()
}

fn has_cycle(graph: &TokenGraph, relevant: &[bool]) -> bool {
    topological_order(graph, relevant).is_none()
}

/// Kahn ordering of the relevant vertices, `None` if they contain a cycle.
pub(crate) fn topological_order(graph: &TokenGraph, relevant: &[bool]) -> Option<Vec<usize>> {
    let n = graph.tokens.len();
    let mut indegree = vec![0usize; n];
    for e in &graph.edges {
        if relevant[e.from] && relevant[e.to] {
            indegree[e.to] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| relevant[v] && indegree[v] == 0).collect();
    let mut order = Vec::new();
    while let Some(v) = ready.pop() {
        order.push(v);
        for e in &graph.edges {
            if e.from == v && relevant[e.to] {
                indegree[e.to] -= 1;
                if indegree[e.to] == 0 {
                    ready.push(e.to);
                }
            }
        }
    }
    (order.len() == relevant.iter().filter(|r| **r).count()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfmm::PowerEdge;

    #[test]
    fn detects_cycle_between_source_and_sink() {
        let mut g = TokenGraph::new();
        let id = PowerEdge::identity();
        g.add_edge("A", "B", id, false).unwrap();
        g.add_edge("B", "C", id, false).unwrap();
        g.add_edge("C", "B", id, false).unwrap();
        g.add_edge("C", "D", id, false).unwrap();
        let (a, d) = (g.token("A").unwrap(), g.token("D").unwrap());
        assert_eq!(enumerate_paths(&g, a, d), Err(Error::CyclicGraph));
    }

    #[test]
    fn ignores_unreachable_cycle() {
        let mut g = TokenGraph::new();
        let id = PowerEdge::identity();
        g.add_edge("A", "B", id, false).unwrap();
        g.add_edge("X", "Y", id, false).unwrap();
        g.add_edge("Y", "X", id, false).unwrap();
        let (a, b) = (g.token("A").unwrap(), g.token("B").unwrap());
        assert_eq!(enumerate_paths(&g, a, b).unwrap(), vec![vec![0]]);
        let x = g.token("X").unwrap();
        assert_eq!(enumerate_paths(&g, a, x), Err(Error::NoPath));
    }
}
