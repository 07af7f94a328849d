//! Parameter sweeps over graph families. Each cell is one rendezvous run; rows
//! come out sorted by cell parameters whatever order the cells ran in.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analytic_bound, rendezvous_cap, run_rendezvous};
use crate::adversary::ring_length;
use crate::agent::Label;
use crate::graph::{
    generate_butterfly, generate_caterpillar, generate_random_connected, generate_ring,
    CaterpillarPolicy, NodeId, PortGraph, RingNumbering,
};
use crate::oracle::OracleMode;
use crate::sim::{SimConfig, TraceDetail};

/// CSV columns, in output order.
pub const COLUMNS: &[&str] = &[
    "family",
    "variant",
    "nodes",
    "max_degree",
    "distance",
    "seed",
    "offset",
    "start1",
    "start2",
    "label1",
    "label2",
    "oracle_mode",
    "rep",
    "outcome",
    "met_round",
    "rounds",
    "round_cap",
    "analytic_bound",
    "bound_ratio",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Parameters: `distances` (spine length) x `degrees`.
    Caterpillar,
    /// Parameters: `sizes` (clique size k) x `distances` (column offset).
    Butterfly,
    /// Parameters: `sizes` (n) x `distances` (start separation).
    Ring,
    /// Parameters: `sizes` (n) x `degrees` (degree cap) x `seeds`. Starts are
    /// node 0 and the lowest-numbered node farthest from it.
    Random,
}

/// `Fixed`: adversarial caterpillar, mirrored ring, sorted butterfly.
/// `Seeded`: one numbering per seed (uniform-random caterpillar, random ring).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Numbering {
    Fixed,
    Seeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: Family,
    #[serde(default = "default_numbering")]
    pub numbering: Numbering,
    #[serde(default)]
    pub distances: Vec<u32>,
    #[serde(default)]
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub label_pairs: Vec<(Label, Label)>,
    #[serde(default = "default_mode")]
    pub oracle_mode: OracleMode,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    /// Ring only: run every rotation of the start pair around the ring.
    #[serde(default)]
    pub all_rotations: bool,
}

fn default_numbering() -> Numbering {
    Numbering::Fixed
}

fn default_mode() -> OracleMode {
    OracleMode::ExactValue
}

fn default_reps() -> usize {
    1
}

impl SweepSpec {
    pub fn new(family: Family, label_pairs: Vec<(Label, Label)>) -> Self {
        SweepSpec {
            family,
            numbering: Numbering::Fixed,
            distances: Vec::new(),
            degrees: Vec::new(),
            sizes: Vec::new(),
            seeds: Vec::new(),
            label_pairs,
            oracle_mode: OracleMode::ExactValue,
            repetitions: 1,
            all_rotations: false,
        }
    }

    /// Every cell of the cartesian product, in canonical order.
    pub fn cells(&self) -> Vec<Cell> {
        let seeds: Vec<u64> = match self.numbering {
            Numbering::Fixed => vec![0],
            Numbering::Seeded => self.seeds.clone(),
        };
        let mut graphs = Vec::new();
        match self.family {
            Family::Caterpillar => {
                for &d in &self.distances {
                    for &delta in &self.degrees {
                        for &seed in &seeds {
                            graphs.push((d as usize, delta, d, seed, 0));
                        }
                    }
                }
            }
            Family::Butterfly => {
                for &k in &self.sizes {
                    for &d in &self.distances {
                        for &seed in &seeds {
                            graphs.push((k, k + 3, d, seed, 0));
                        }
                    }
                }
            }
            Family::Ring => {
                for &n in &self.sizes {
                    for &d in &self.distances {
                        for &seed in &seeds {
                            let offsets = if self.all_rotations { n } else { 1 };
                            for offset in 0..offsets {
                                graphs.push((n, 2, d, seed, offset));
                            }
                        }
                    }
                }
            }
            Family::Random => {
                for &n in &self.sizes {
                    for &delta in &self.degrees {
                        for &seed in &self.seeds {
                            graphs.push((n, delta, 0, seed, 0));
                        }
                    }
                }
            }
        }
        let mut cells = Vec::new();
        for (size, degree, distance, seed, offset) in graphs {
            for &labels in &self.label_pairs {
                for rep in 0..self.repetitions {
                    cells.push(Cell {
                        family: self.family,
                        numbering: self.numbering,
                        size,
                        degree,
                        distance,
                        seed,
                        offset,
                        labels,
                        oracle_mode: self.oracle_mode,
                        rep,
                    });
                }
            }
        }
        cells.sort();
        cells
    }
}

/// One sweep cell. Field order is the sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub family: Family,
    pub numbering: Numbering,
    /// Caterpillar spine length, butterfly `k`, ring or random-graph `n`.
    pub size: usize,
    pub degree: usize,
    pub distance: u32,
    pub seed: u64,
    pub offset: usize,
    pub labels: (Label, Label),
    pub oracle_mode: OracleMode,
    pub rep: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub variant: &'static str,
    pub nodes: usize,
    pub max_degree: usize,
    pub distance: u32,
    pub seed: u64,
    pub offset: usize,
    pub start1: usize,
    pub start2: usize,
    pub label1: Label,
    pub label2: Label,
    pub oracle_mode: OracleMode,
    pub rep: usize,
    pub outcome: &'static str,
    pub met_round: Option<u64>,
    pub rounds: u64,
    pub round_cap: u64,
    pub analytic_bound: u64,
    pub bound_ratio: Option<f64>,
    pub error: String,
}

impl SweepRow {
    /// A finished run that failed to meet within the analytic bound.
    pub fn violates_bound(&self) -> bool {
        self.error.is_empty() && self.bound_ratio.is_none_or(|r| r > 1.0)
    }
}

/// The graph and start pair of a cell.
pub struct CellGraph {
    pub graph: PortGraph,
    pub variant: &'static str,
    pub starts: (NodeId, NodeId),
}

pub fn instantiate(cell: &Cell) -> Result<CellGraph, String> {
    let e = |err: crate::graph::GraphError| err.to_string();
    match cell.family {
        Family::Caterpillar => {
            let (policy, variant) = match cell.numbering {
                Numbering::Fixed => (CaterpillarPolicy::Adversarial, "adversarial"),
                Numbering::Seeded => (CaterpillarPolicy::UniformRandom(cell.seed), "uniform-random"),
            };
            let c = generate_caterpillar(cell.size, cell.degree, policy).map_err(e)?;
            Ok(CellGraph {
                graph: c.graph,
                variant,
                starts: c.starts,
            })
        }
        Family::Butterfly => {
            if cell.numbering == Numbering::Seeded {
                return Err("butterfly has no seeded numbering".into());
            }
            let k = cell.size;
            let b = generate_butterfly(k, ring_length(k, cell.distance)).map_err(e)?;
            let starts = (b.vertex(0, 0), b.vertex(0, cell.distance as usize));
            Ok(CellGraph {
                graph: b.graph,
                variant: "sorted",
                starts,
            })
        }
        Family::Ring => {
            let n = cell.size;
            if cell.distance as usize > n / 2 {
                return Err(format!("distance {} exceeds n/2 on a ring of {n}", cell.distance));
            }
            let (numbering, variant) = match cell.numbering {
                Numbering::Fixed => (RingNumbering::Mirrored, "mirrored"),
                Numbering::Seeded => (RingNumbering::Random(cell.seed), "random"),
            };
            let graph = generate_ring(n, numbering).map_err(e)?;
            let s = cell.offset % n;
            let starts = (NodeId(s), NodeId((s + cell.distance as usize) % n));
            Ok(CellGraph {
                graph,
                variant,
                starts,
            })
        }
        Family::Random => {
            let graph = generate_random_connected(cell.size, cell.degree, cell.seed).map_err(e)?;
            let dist = graph.bfs_distances(NodeId(0));
            let far = (0..dist.len()).max_by_key(|&v| (dist[v], std::cmp::Reverse(v)));
            Ok(CellGraph {
                graph,
                variant: "random",
                starts: (NodeId(0), NodeId(far.unwrap_or(0))),
            })
        }
    }
}

pub fn run_cell(cell: &Cell) -> SweepRow {
    let (l1, l2) = cell.labels;
    let mut row = SweepRow {
        family: cell.family,
        variant: "",
        nodes: 0,
        max_degree: 0,
        distance: cell.distance,
        seed: cell.seed,
        offset: cell.offset,
        start1: 0,
        start2: 0,
        label1: l1,
        label2: l2,
        oracle_mode: cell.oracle_mode,
        rep: cell.rep,
        outcome: "error",
        met_round: None,
        rounds: 0,
        round_cap: 0,
        analytic_bound: 0,
        bound_ratio: None,
        error: String::new(),
    };
    if l1 == l2 {
        row.error = "labels must differ".into();
        return row;
    }
    let inst = match instantiate(cell) {
        Ok(inst) => inst,
        Err(msg) => {
            row.error = msg;
            return row;
        }
    };
    let g = &inst.graph;
    let distance = g.bfs_distances(inst.starts.0)[inst.starts.1.index()];
    row.variant = inst.variant;
    row.nodes = g.node_count();
    row.max_degree = g.max_degree();
    row.distance = distance;
    row.start1 = inst.starts.0.index();
    row.start2 = inst.starts.1.index();
    row.round_cap = rendezvous_cap(g, distance, l1, l2);
    row.analytic_bound = analytic_bound(g.max_degree(), distance, l1, l2);
    let cfg = SimConfig::new(row.round_cap)
        .with_mode(cell.oracle_mode)
        .with_detail(TraceDetail::MeetingOnly);
    match run_rendezvous(g, inst.starts, cell.labels, &cfg) {
        Ok(r) => {
            row.rounds = r.rounds;
            row.met_round = r.met_round();
            row.outcome = if row.met_round.is_some() { "met" } else { "cap-reached" };
            row.bound_ratio = row
                .met_round
                .map(|m| m as f64 / row.analytic_bound as f64);
        }
        Err(err) => row.error = err.to_string(),
    }
    row
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSummary {
    pub cells: usize,
    pub met: usize,
    pub cap_reached: usize,
    pub errors: usize,
    pub violations: usize,
    pub max_bound_ratio: f64,
    pub max_met_round: u64,
}

impl SweepSummary {
    pub fn of(rows: &[SweepRow]) -> Self {
        let mut s = SweepSummary {
            cells: rows.len(),
            ..Default::default()
        };
        for row in rows {
            match row.outcome {
                "met" => s.met += 1,
                "cap-reached" => s.cap_reached += 1,
                _ => s.errors += 1,
            }
            if row.violates_bound() {
                s.violations += 1;
            }
            if let Some(r) = row.bound_ratio {
                s.max_bound_ratio = s.max_bound_ratio.max(r);
            }
            s.max_met_round = s.max_met_round.max(row.met_round.unwrap_or(0));
        }
        s
    }
}

impl std::fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "cells={} met={} cap_reached={} errors={} violations={} max_bound_ratio={:.6} max_met_round={}",
            self.cells,
            self.met,
            self.cap_reached,
            self.errors,
            self.violations,
            self.max_bound_ratio,
            self.max_met_round
        )
    }
}

/// Runs all cells on the current rayon pool and returns rows in canonical
/// order.
pub fn run_sweep(specs: &[SweepSpec]) -> Vec<SweepRow> {
    let mut cells: Vec<Cell> = specs.iter().flat_map(SweepSpec::cells).collect();
    cells.sort();
    cells.dedup();
    cells.par_iter().map(run_cell).collect()
}

pub fn write_csv<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(COLUMNS)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_range_gives_header_only() {
        let mut spec = SweepSpec::new(Family::Caterpillar, vec![(2, 5)]);
        spec.degrees = vec![3];
        let rows = run_sweep(&[spec]);
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), COLUMNS.join(",") + "\n");
    }

    #[test]
    fn row_fields_match_columns() {
        let mut spec = SweepSpec::new(Family::Caterpillar, vec![(2, 5)]);
        spec.distances = vec![2];
        spec.degrees = vec![3];
        let rows = run_sweep(&[spec]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), COLUMNS.len());
        assert!(lines[1].starts_with("caterpillar,adversarial,8,3,2,"));
    }

    #[test]
    fn equal_labels_are_recorded_as_errors() {
        let mut spec = SweepSpec::new(Family::Ring, vec![(3, 3), (1, 2)]);
        spec.sizes = vec![6];
        spec.distances = vec![3, 4];
        let rows = run_sweep(&[spec]);
        assert_eq!(rows.len(), 4);
        let s = SweepSummary::of(&rows);
        assert_eq!(s.errors, 3);
        assert_eq!(s.met, 1);
        assert_eq!(s.violations, 0);
    }

    #[test]
    fn rotations_expand_ring_cells() {
        let mut spec = SweepSpec::new(Family::Ring, vec![(1, 2)]);
        spec.sizes = vec![8];
        spec.distances = vec![4];
        spec.all_rotations = true;
        assert_eq!(spec.cells().len(), 8);
    }
}
