//! Graph families: caterpillars, clique butterflies, rings and random
//! connected graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, NodeId, PortGraph};
use crate::adversary::caterpillar_adversarial_numbering;

/// Where the spine edges of a caterpillar sit among each node's ports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaterpillarPolicy {
    /// The spine edge leading toward the other agent gets the highest port.
    Adversarial,
    /// Ports shuffled at every spine node with a seeded RNG.
    UniformRandom(u64),
}

/// A line of `D + 1` spine nodes, each padded with leaves to degree exactly `Δ`.
#[derive(Debug, Clone)]
pub struct Caterpillar {
    pub graph: PortGraph,
    pub spine: Vec<NodeId>,
    pub starts: (NodeId, NodeId),
    pub length: usize,
    pub degree: usize,
}

pub fn generate_caterpillar(
    length: usize,
    degree: usize,
    policy: CaterpillarPolicy,
) -> Result<Caterpillar, GraphError> {
    if length < 1 {
        return Err(GraphError::InvalidParams(
            "caterpillar spine length D must be at least 1".into(),
        ));
    }
    if degree < 2 {
        return Err(GraphError::InvalidParams(format!(
            "caterpillar degree must be at least 2 (got {degree})"
        )));
    }
    let spine_len = length + 1;
    let mut edges = Vec::new();
    let mut next = spine_len;
    for s in 0..spine_len {
        let spine_edges = if s == 0 || s == length { 1 } else { 2 };
        for i in 0..degree - spine_edges {
            edges.push((s, i as u32 + 1, next, 1));
            next += 1;
        }
    }
    // Spine edges take the ports after the leaves.
    for s in 0..length {
        let to_port = if s + 1 == length { degree } else { degree - 1 };
        edges.push((s, degree as u32, s + 1, to_port as u32));
    }
    let topology = PortGraph::build(next, &edges)?;
    let spine: Vec<NodeId> = (0..spine_len).map(NodeId).collect();
    let graph = caterpillar_adversarial_numbering(&topology, &spine, policy)?;
    Ok(Caterpillar {
        graph,
        starts: (spine[0], spine[length]),
        spine,
        length,
        degree,
    })
}

/// `k`-clique-`p`-butterfly with vertices `v(i, j)` at index `j * k + i`.
#[derive(Debug, Clone)]
pub struct Butterfly {
    pub graph: PortGraph,
    pub k: usize,
    pub p: usize,
}

impl Butterfly {
    pub fn vertex(&self, row: usize, column: usize) -> NodeId {
        butterfly_vertex(self.k, row, column)
    }

    /// `(row, column)` of a vertex.
    pub fn coord(&self, v: NodeId) -> (usize, usize) {
        (v.0 % self.k, v.0 / self.k)
    }

    pub fn degree(&self) -> usize {
        self.k + 3
    }
}

pub fn butterfly_vertex(k: usize, row: usize, column: usize) -> NodeId {
    NodeId(column * k + row)
}

pub(crate) fn check_butterfly_params(k: usize, p: usize) -> Result<(), GraphError> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(GraphError::InvalidParams(format!(
            "butterfly clique size k must be odd and at least 3 (got {k})"
        )));
    }
    let min_p = (2 * k.ilog2() as usize).max(3);
    if p < min_p {
        return Err(GraphError::InvalidParams(format!(
            "butterfly ring length p must be at least max(3, 2*floor(log2 k)) = {min_p} (got {p})"
        )));
    }
    Ok(())
}

/// Neighbor sets of the butterfly, unordered: clique mates, the two forward
/// bridges `(2i mod k, j+1)`, `(2i+1 mod k, j+1)` and the two backward bridges.
pub(crate) fn butterfly_adjacency(k: usize, p: usize) -> Vec<Vec<NodeId>> {
    let mut adj = vec![Vec::with_capacity(k + 3); k * p];
    for j in 0..p {
        for i in 0..k {
            let v = butterfly_vertex(k, i, j);
            for i2 in 0..k {
                if i2 != i {
                    adj[v.0].push(butterfly_vertex(k, i2, j));
                }
            }
            for i2 in [(2 * i) % k, (2 * i + 1) % k] {
                let w = butterfly_vertex(k, i2, (j + 1) % p);
                adj[v.0].push(w);
                adj[w.0].push(v);
            }
        }
    }
    adj
}

/// Butterfly with the canonical numbering: ports follow ascending neighbor index.
pub fn generate_butterfly(k: usize, p: usize) -> Result<Butterfly, GraphError> {
    check_butterfly_params(k, p)?;
    let mut adj = butterfly_adjacency(k, p);
    for row in &mut adj {
        row.sort_unstable();
    }
    let graph = PortGraph::from_port_order(&adj)?;
    Ok(Butterfly { graph, k, p })
}

/// Column separation around a ring of `p` columns.
pub fn horizontal_distance(column_a: usize, column_b: usize, p: usize) -> usize {
    let fwd = (column_a + p - column_b % p) % p;
    let back = (column_b + p - column_a % p) % p;
    fwd.min(back)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingNumbering {
    /// Port 1 leads to `v + 1` and port 2 to `v - 1` at every node, so every
    /// rotation of the ring is a port-preserving automorphism.
    Mirrored,
    /// Each node flips a seeded coin for which side gets port 1.
    Random(u64),
}

pub fn generate_ring(n: usize, numbering: RingNumbering) -> Result<PortGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParams(format!(
            "ring needs at least 3 nodes (got {n})"
        )));
    }
    let mut rng = match numbering {
        RingNumbering::Mirrored => None,
        RingNumbering::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let order: Vec<Vec<NodeId>> = (0..n)
        .map(|v| {
            let cw = NodeId((v + 1) % n);
            let ccw = NodeId((v + n - 1) % n);
            if rng.as_mut().is_some_and(|r| r.gen::<bool>()) {
                vec![ccw, cw]
            } else {
                vec![cw, ccw]
            }
        })
        .collect();
    PortGraph::from_port_order(&order)
}

/// Random connected graph with maximum degree at most `max_degree`. Same
/// arguments, same graph.
pub fn generate_random_connected(
    n: usize,
    max_degree: usize,
    seed: u64,
) -> Result<PortGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InfeasibleParams(format!(
            "a connected graph with two agents needs n >= 2 (got {n})"
        )));
    }
    if max_degree == 0 || (max_degree < 2 && n > 2) {
        return Err(GraphError::InfeasibleParams(format!(
            "max degree {max_degree} cannot connect {n} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];

    // Random spanning tree: a tree always has a node below the cap when cap >= 2.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    for idx in 1..n {
        let v = perm[idx];
        let open: Vec<usize> = perm[..idx]
            .iter()
            .copied()
            .filter(|&u| adj[u].len() < max_degree)
            .collect();
        let u = open[rng.gen_range(0..open.len())];
        adj[u].push(NodeId(v));
        adj[v].push(NodeId(u));
    }

    // Extra chords, up to about one per node.
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra * 4 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v
            || adj[u].len() >= max_degree
            || adj[v].len() >= max_degree
            || adj[u].contains(&NodeId(v))
        {
            continue;
        }
        adj[u].push(NodeId(v));
        adj[v].push(NodeId(u));
    }

    for row in &mut adj {
        row.sort_unstable();
        row.shuffle(&mut rng);
    }
    PortGraph::from_port_order(&adj)
}
