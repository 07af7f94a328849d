//! The distance-measuring device: exact hop distances between the agents, or
//! only whether the distance went down, stayed, or went up.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, PortGraph};

/// Default node-count ceiling for [`all_pairs`].
pub const ALL_PAIRS_LIMIT: usize = 4096;

/// Graphs up to this size get a precomputed table inside [`DistanceOracle`].
pub const ORACLE_TABLE_LIMIT: usize = 1024;

const ROW_CACHE_CAP: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} nodes, above the all-pairs limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// What agents are allowed to learn about the distance each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    ExactValue,
    DeltaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceDelta {
    Decreased,
    Same,
    Increased,
}

pub fn delta(prev: u32, curr: u32) -> DistanceDelta {
    use std::cmp::Ordering::*;
    match curr.cmp(&prev) {
        Less => DistanceDelta::Decreased,
        Equal => DistanceDelta::Same,
        Greater => DistanceDelta::Increased,
    }
}

/// One round's distance reading as handed to an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceReading {
    Exact(u32),
    Delta(DistanceDelta),
}

/// Dense `n x n` hop-distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    data: Vec<u32>,
}

impl DistanceTable {
    pub fn get(&self, u: NodeId, v: NodeId) -> u32 {
        self.data[u.0 * self.n + v.0]
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn row(&self, u: NodeId) -> &[u32] {
        &self.data[u.0 * self.n..(u.0 + 1) * self.n]
    }
}

/// All-pairs hop distances by one BFS per source.
pub fn all_pairs(g: &PortGraph, limit: usize) -> Result<DistanceTable, OracleError> {
    let n = g.node_count();
    if n > limit {
        return Err(OracleError::TooLarge { n, limit });
    }
    let mut data = Vec::with_capacity(n * n);
    for u in g.nodes() {
        data.extend(g.bfs_distances(u));
    }
    Ok(DistanceTable { n, data })
}

/// Per-run distance device over an immutable graph.
///
/// Small graphs are served from a precomputed table; larger ones from BFS rows
/// cached by source, since at least one agent is usually idle in any round.
pub struct DistanceOracle<'g> {
    graph: &'g PortGraph,
    mode: OracleMode,
    table: Option<DistanceTable>,
    rows: HashMap<NodeId, Vec<u32>>,
}

impl<'g> DistanceOracle<'g> {
    pub fn new(graph: &'g PortGraph, mode: OracleMode) -> Self {
        let table = all_pairs(graph, ORACLE_TABLE_LIMIT).ok();
        DistanceOracle {
            graph,
            mode,
            table,
            rows: HashMap::new(),
        }
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn distance(&mut self, u: NodeId, v: NodeId) -> u32 {
        if let Some(t) = &self.table {
            return t.get(u, v);
        }
        if let Some(row) = self.rows.get(&u) {
            return row[v.0];
        }
        if let Some(row) = self.rows.get(&v) {
            return row[u.0];
        }
        if self.rows.len() >= ROW_CACHE_CAP {
            self.rows.clear();
        }
        let row = self.graph.bfs_distances(u);
        let d = row[v.0];
        self.rows.insert(u, row);
        d
    }

    /// What an agent is shown, given last round's distance (if any) and this
    /// round's. Delta mode reports `Same` in the first round.
    pub fn reading(&self, prev: Option<u32>, curr: u32) -> DistanceReading {
        match self.mode {
            OracleMode::ExactValue => DistanceReading::Exact(curr),
            OracleMode::DeltaOnly => DistanceReading::Delta(match prev {
                Some(p) => delta(p, curr),
                None => DistanceDelta::Same,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_butterfly, generate_ring, RingNumbering};

    #[test]
    fn basic_distances() {
        let g = PortGraph::build(2, &[(0, 1, 1, 1)]).unwrap();
        let mut o = DistanceOracle::new(&g, OracleMode::ExactValue);
        assert_eq!(o.distance(NodeId(0), NodeId(0)), 0);
        assert_eq!(o.distance(NodeId(0), NodeId(1)), 1);

        let b = generate_butterfly(3, 4).unwrap();
        let mut o = DistanceOracle::new(&b.graph, OracleMode::ExactValue);
        assert_eq!(o.distance(b.vertex(0, 0), b.vertex(0, 2)), 2);
    }

    #[test]
    fn deltas() {
        assert_eq!(delta(3, 2), DistanceDelta::Decreased);
        assert_eq!(delta(3, 3), DistanceDelta::Same);
        assert_eq!(delta(0, 1), DistanceDelta::Increased);
    }

    #[test]
    fn readings_follow_mode() {
        let g = PortGraph::build(2, &[(0, 1, 1, 1)]).unwrap();
        let exact = DistanceOracle::new(&g, OracleMode::ExactValue);
        let deltas = DistanceOracle::new(&g, OracleMode::DeltaOnly);
        assert_eq!(exact.reading(Some(2), 1), DistanceReading::Exact(1));
        assert_eq!(
            deltas.reading(Some(2), 1),
            DistanceReading::Delta(DistanceDelta::Decreased)
        );
        assert_eq!(
            deltas.reading(None, 1),
            DistanceReading::Delta(DistanceDelta::Same)
        );
    }

    #[test]
    fn all_pairs_small_cases() {
        let path = PortGraph::build(3, &[(0, 1, 1, 1), (1, 2, 2, 1)]).unwrap();
        let t = all_pairs(&path, ALL_PAIRS_LIMIT).unwrap();
        let rows: Vec<Vec<u32>> = path.nodes().map(|u| t.row(u).to_vec()).collect();
        assert_eq!(rows, vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]);

        let ring = generate_ring(6, RingNumbering::Mirrored).unwrap();
        let t = all_pairs(&ring, ALL_PAIRS_LIMIT).unwrap();
        assert_eq!(t.get(NodeId(0), NodeId(3)), 3);

        assert_eq!(
            all_pairs(&ring, 5),
            Err(OracleError::TooLarge { n: 6, limit: 5 })
        );
    }

    #[test]
    fn cached_rows_agree_with_table() {
        let g = crate::graph::generate_random_connected(1500, 6, 3).unwrap();
        let mut o = DistanceOracle::new(&g, OracleMode::ExactValue);
        assert!(o.table.is_none());
        for (u, v) in [(0, 1499), (1499, 0), (17, 900), (900, 17), (5, 5)] {
            let expect = g.bfs_distances(NodeId(u))[v];
            assert_eq!(o.distance(NodeId(u), NodeId(v)), expect);
        }
    }
}
