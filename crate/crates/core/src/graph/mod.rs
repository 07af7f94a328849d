//! Anonymous port-labeled graphs.
//!
//! A [`PortGraph`] is an undirected simple graph in which every node numbers its
//! incident edges with the ports `1..=deg(v)`. The two endpoints of an edge pick
//! their port numbers independently. Node identifiers exist only for the
//! simulator; agents never see them.

pub mod generators;
pub mod io;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generators::{
    generate_butterfly, generate_caterpillar, generate_random_connected, generate_ring,
    horizontal_distance, Butterfly, Caterpillar, CaterpillarPolicy, RingNumbering,
};

/// Port number at a node. `0` is the "stay" pseudo-port and never labels an edge.
pub type Port = u32;

/// Simulator-side node index, dense in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One edge as given to [`PortGraph::build`]: `(u, port at u, v, port at v)`.
pub type EdgeSpec = (usize, Port, usize, Port);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("port 0 is reserved for staying put (edge at node {node})")]
    ZeroPort { node: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("port {port} used twice at node {node}")]
    DuplicatePort { node: usize, port: Port },
    #[error("ports at node {node} are not exactly 1..={degree}")]
    PortGap { node: usize, degree: usize },
    #[error("parallel edges between nodes {u} and {v}")]
    ParallelEdge { u: usize, v: usize },
    #[error("graph is disconnected: node {node} is unreachable from node 0")]
    Disconnected { node: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("not a paired numbering: {0}")]
    NotPaired(String),
}

/// Finite, connected, simple, undirected graph with per-endpoint port labels.
///
/// `adj[v][p - 1] = (w, q)` means port `p` at `v` leads to `w`, entering through
/// port `q`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortGraph {
    adj: Vec<Vec<(NodeId, Port)>>,
}

impl PortGraph {
    /// Builds and validates a graph from an explicit edge list.
    pub fn build(n: usize, edges: &[EdgeSpec]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut slots: Vec<Vec<Option<(NodeId, Port)>>> = vec![Vec::new(); n];
        for &(u, pu, v, pv) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if pu == 0 {
                return Err(GraphError::ZeroPort { node: u });
            }
            if pv == 0 {
                return Err(GraphError::ZeroPort { node: v });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            place(&mut slots, u, pu, (NodeId(v), pv))?;
            place(&mut slots, v, pv, (NodeId(u), pu))?;
        }

        let mut adj = Vec::with_capacity(n);
        for (node, ports) in slots.into_iter().enumerate() {
            let degree = ports.iter().filter(|s| s.is_some()).count();
            let row: Option<Vec<_>> = ports.into_iter().collect();
            match row {
                Some(row) => adj.push(row),
                None => return Err(GraphError::PortGap { node, degree }),
            }
        }

        let g = PortGraph { adj };
        g.check_simple()?;
        g.check_connected()?;
        Ok(g)
    }

    /// Builds a graph from per-node neighbor lists in port order: port `i` at `v`
    /// leads to `order[v][i - 1]`. Needs a simple graph (neighbors identify edges).
    pub fn from_port_order(order: &[Vec<NodeId>]) -> Result<Self, GraphError> {
        let n = order.len();
        let mut edges = Vec::new();
        for (u, nbrs) in order.iter().enumerate() {
            for (i, &w) in nbrs.iter().enumerate() {
                if w.0 >= n {
                    return Err(GraphError::NodeOutOfRange { node: w.0, n });
                }
                if u < w.0 {
                    let back = order[w.0].iter().position(|&x| x.0 == u).ok_or_else(|| {
                        GraphError::InvalidParams(format!(
                            "node {u} lists {w} as a neighbor but not vice versa"
                        ))
                    })?;
                    edges.push((u, i as Port + 1, w.0, back as Port + 1));
                } else if u == w.0 {
                    return Err(GraphError::SelfLoop { node: u });
                }
            }
        }
        let g = Self::build(n, &edges)?;
        // Every listed neighbor must have produced an edge.
        for (u, nbrs) in order.iter().enumerate() {
            if g.degree(NodeId(u)) != nbrs.len() {
                return Err(GraphError::InvalidParams(format!(
                    "asymmetric neighbor lists at node {u}"
                )));
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId)
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.adj.len()
    }

    /// Where port `port` at `v` leads, or `None` for the stay port and
    /// out-of-range ports.
    pub fn neighbor(&self, v: NodeId, port: Port) -> Option<(NodeId, Port)> {
        if port == 0 {
            return None;
        }
        self.adj[v.0].get(port as usize - 1).copied()
    }

    /// `(port, neighbor, entry port)` triples at `v` in port order.
    pub fn ports(&self, v: NodeId) -> impl Iterator<Item = (Port, NodeId, Port)> + '_ {
        self.adj[v.0]
            .iter()
            .enumerate()
            .map(|(i, &(w, q))| (i as Port + 1, w, q))
    }

    /// Neighbors of `v` in port order.
    pub fn port_order(&self, v: NodeId) -> Vec<NodeId> {
        self.adj[v.0].iter().map(|&(w, _)| w).collect()
    }

    /// Each edge once, as `(u, pu, v, pv)` with `u < v`, sorted by `(u, pu)`.
    pub fn edges(&self) -> Vec<EdgeSpec> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, row) in self.adj.iter().enumerate() {
            for (i, &(w, q)) in row.iter().enumerate() {
                if u < w.0 {
                    out.push((u, i as Port + 1, w.0, q));
                }
            }
        }
        out
    }

    pub fn is_regular(&self) -> bool {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|row| row.len() == d)
    }

    /// Hop distances from `src` to every node (`u32::MAX` if unreachable).
    pub fn bfs_distances(&self, src: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        dist[src.0] = 0;
        queue.push_back(src.0);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &(w, _) in &self.adj[u] {
                if dist[w.0] == u32::MAX {
                    dist[w.0] = du + 1;
                    queue.push_back(w.0);
                }
            }
        }
        dist
    }

    /// A copy with the edges behind ports `a` and `b` at `v` exchanged. The
    /// far-end entry ports follow along, so the result is a valid port graph.
    pub fn with_swapped_ports(&self, v: NodeId, a: Port, b: Port) -> Result<Self, GraphError> {
        let deg = self.degree(v) as Port;
        if a == 0 || b == 0 || a > deg || b > deg {
            return Err(GraphError::InvalidParams(format!(
                "ports {a} and {b} must both exist at node {v}"
            )));
        }
        let mut order: Vec<Vec<NodeId>> = self.nodes().map(|u| self.port_order(u)).collect();
        order[v.0].swap(a as usize - 1, b as usize - 1);
        Self::from_port_order(&order)
    }

    fn check_simple(&self) -> Result<(), GraphError> {
        let mut seen = vec![usize::MAX; self.adj.len()];
        for (u, row) in self.adj.iter().enumerate() {
            for &(w, _) in row {
                if seen[w.0] == u {
                    return Err(GraphError::ParallelEdge {
                        u: u.min(w.0),
                        v: u.max(w.0),
                    });
                }
                seen[w.0] = u;
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let dist = self.bfs_distances(NodeId(0));
        match dist.iter().position(|&d| d == u32::MAX) {
            Some(node) => Err(GraphError::Disconnected { node }),
            None => Ok(()),
        }
    }
}

fn place(
    slots: &mut [Vec<Option<(NodeId, Port)>>],
    node: usize,
    port: Port,
    target: (NodeId, Port),
) -> Result<(), GraphError> {
    let row = &mut slots[node];
    let idx = port as usize - 1;
    if row.len() <= idx {
        row.resize(idx + 1, None);
    }
    if row[idx].is_some() {
        return Err(GraphError::DuplicatePort { node, port });
    }
    row[idx] = Some(target);
    Ok(())
}

/// A `Δ`-regular port graph in which every edge's endpoint ports sum to `Δ + 1`.
///
/// An agent leaving by port `x` always enters through `Δ + 1 - x`, so every
/// vertex looks the same from the inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedNumbering {
    graph: PortGraph,
    degree: usize,
}

impl PairedNumbering {
    pub fn new(graph: PortGraph) -> Result<Self, GraphError> {
        if !graph.is_regular() {
            return Err(GraphError::NotPaired("graph is not regular".into()));
        }
        let degree = graph.degree(NodeId(0));
        let sum = degree as Port + 1;
        for (u, pu, v, pv) in graph.edges() {
            if pu + pv != sum {
                return Err(GraphError::NotPaired(format!(
                    "edge {u}:{pu} - {v}:{pv} has port sum {} instead of {sum}",
                    pu + pv
                )));
            }
        }
        Ok(PairedNumbering { graph, degree })
    }

    pub fn graph(&self) -> &PortGraph {
        &self.graph
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn into_graph(self) -> PortGraph {
        self.graph
    }
}
