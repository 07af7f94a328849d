//! Synchronous two-agent round engine.
//!
//! Each round both agents receive an [`Observation`], both answer with a port,
//! and both moves are applied at once. Agents meet when they stand on the same
//! node; swapping places across an edge is not a meeting.

pub mod replay;
pub mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{AgentProgram, Observation};
use crate::graph::{NodeId, Port, PortGraph};
use crate::oracle::{DistanceOracle, OracleMode};

pub use replay::{replay_check, Violation, ViolationKind};

/// Upper limit on any round cap chosen automatically.
pub const HARD_ROUND_CEILING: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("start node {node} is not in the graph ({n} nodes)")]
    InvalidStart { node: NodeId, n: usize },
    #[error("round cap must be at least 1")]
    ZeroRoundCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceDetail {
    Full,
    MeetingOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub round_cap: u64,
    pub oracle_mode: OracleMode,
    pub trace_detail: TraceDetail,
}

impl SimConfig {
    pub fn new(round_cap: u64) -> Self {
        SimConfig {
            round_cap,
            oracle_mode: OracleMode::ExactValue,
            trace_detail: TraceDetail::Full,
        }
    }

    pub fn with_mode(mut self, mode: OracleMode) -> Self {
        self.oracle_mode = mode;
        self
    }

    pub fn with_detail(mut self, detail: TraceDetail) -> Self {
        self.trace_detail = detail;
        self
    }
}

/// Default cap for rendezvous runs: `16·Δ·(D + 2·k_max + 4)`, at most
/// [`HARD_ROUND_CEILING`]. `k_max` is the larger label bit length.
pub fn default_round_cap(max_degree: usize, distance: u32, max_label_bits: usize) -> u64 {
    let cap = 16 * max_degree.max(1) as u64 * (distance as u64 + 2 * max_label_bits as u64 + 4);
    cap.min(HARD_ROUND_CEILING)
}

/// One simulated round. `round` is 0-based; the row for round `r` holds the
/// positions and distance before the moves and the positions after them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub round: u64,
    pub start: [NodeId; 2],
    pub distance: u32,
    pub ports: [Port; 2],
    pub arrivals: [Port; 2],
    pub end: [NodeId; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RunOutcome {
    /// Met after `round` rounds; 0 means the agents started together.
    Met { round: u64 },
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub final_positions: [NodeId; 2],
    pub rounds: u64,
    pub trace: Vec<TraceRow>,
}

impl RunResult {
    pub fn met_round(&self) -> Option<u64> {
        match self.outcome {
            RunOutcome::Met { round } => Some(round),
            RunOutcome::CapReached => None,
        }
    }
}

/// Runs two programs in lockstep from `start1` and `start2`.
pub fn run(
    g: &PortGraph,
    start1: NodeId,
    start2: NodeId,
    prog1: &mut dyn AgentProgram,
    prog2: &mut dyn AgentProgram,
    cfg: &SimConfig,
) -> Result<RunResult, SimError> {
    for s in [start1, start2] {
        if !g.contains(s) {
            return Err(SimError::InvalidStart {
                node: s,
                n: g.node_count(),
            });
        }
    }
    if cfg.round_cap == 0 {
        return Err(SimError::ZeroRoundCap);
    }

    let mut oracle = DistanceOracle::new(g, cfg.oracle_mode);
    let mut pos = [start1, start2];
    let mut arrivals: [Port; 2] = [0, 0];
    let mut trace = Vec::new();
    let mut prev: Option<u32> = None;
    let mut dist = oracle.distance(pos[0], pos[1]);

    if pos[0] == pos[1] {
        notify_met(g, &oracle, &pos, &arrivals, prog1, prog2);
        return Ok(RunResult {
            outcome: RunOutcome::Met { round: 0 },
            final_positions: pos,
            rounds: 0,
            trace,
        });
    }

    for round in 0..cfg.round_cap {
        let reading = oracle.reading(prev, dist);
        let obs = |agent: usize| Observation {
            degree: g.degree(pos[agent]),
            arrival_port: arrivals[agent],
            reading,
            met: false,
        };
        let ports = [prog1.step(&obs(0)).port, prog2.step(&obs(1)).port];

        let start = pos;
        for agent in 0..2 {
            match g.neighbor(pos[agent], ports[agent]) {
                Some((next, entry)) => {
                    pos[agent] = next;
                    arrivals[agent] = entry;
                }
                None => arrivals[agent] = 0,
            }
        }
        if cfg.trace_detail == TraceDetail::Full {
            trace.push(TraceRow {
                round,
                start,
                distance: dist,
                ports,
                arrivals,
                end: pos,
            });
        }
        prev = Some(dist);
        dist = oracle.distance(pos[0], pos[1]);

        if pos[0] == pos[1] {
            notify_met(g, &oracle, &pos, &arrivals, prog1, prog2);
            return Ok(RunResult {
                outcome: RunOutcome::Met { round: round + 1 },
                final_positions: pos,
                rounds: round + 1,
                trace,
            });
        }
    }

    Ok(RunResult {
        outcome: RunOutcome::CapReached,
        final_positions: pos,
        rounds: cfg.round_cap,
        trace,
    })
}

fn notify_met(
    g: &PortGraph,
    oracle: &DistanceOracle<'_>,
    pos: &[NodeId; 2],
    arrivals: &[Port; 2],
    prog1: &mut dyn AgentProgram,
    prog2: &mut dyn AgentProgram,
) {
    let reading = oracle.reading(None, 0);
    let obs = |agent: usize| Observation {
        degree: g.degree(pos[agent]),
        arrival_port: arrivals[agent],
        reading,
        met: true,
    };
    prog1.step(&obs(0));
    prog2.step(&obs(1));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{FixedPort, Idle, RendezvousProgram};

    fn edge() -> PortGraph {
        PortGraph::build(2, &[(0, 1, 1, 1)]).unwrap()
    }

    #[test]
    fn co_located_start_is_met_at_zero() {
        let g = edge();
        let r = run(&g, NodeId(0), NodeId(0), &mut Idle, &mut Idle, &SimConfig::new(10)).unwrap();
        assert_eq!(r.outcome, RunOutcome::Met { round: 0 });
        assert!(r.trace.is_empty());
    }

    #[test]
    fn crossing_is_not_meeting() {
        let g = edge();
        let r = run(
            &g,
            NodeId(0),
            NodeId(1),
            &mut FixedPort(1),
            &mut FixedPort(1),
            &SimConfig::new(50),
        )
        .unwrap();
        assert_eq!(r.outcome, RunOutcome::CapReached);
        assert_eq!(r.trace.len(), 50);
        assert!(r.trace.iter().all(|row| row.distance == 1));
    }

    #[test]
    fn one_step_meeting() {
        let g = edge();
        let r = run(&g, NodeId(0), NodeId(1), &mut FixedPort(1), &mut Idle, &SimConfig::new(5))
            .unwrap();
        assert_eq!(r.outcome, RunOutcome::Met { round: 1 });
        assert_eq!(r.trace[0].end, [NodeId(1), NodeId(1)]);
        assert_eq!(r.trace[0].arrivals, [1, 0]);
    }

    #[test]
    fn labels_zero_and_one_on_an_edge() {
        // Hand trace: BoundDegrees(1) at degree 1 is TestPorts(1, 1): both cross
        // (round 0) and cross back (round 1), failure. CompareLabels reads bit 1:
        // label 0 idles, label 1 crosses in round 2 and lands on its peer.
        let g = edge();
        let mut a = RendezvousProgram::new(0);
        let mut b = RendezvousProgram::new(1);
        let r = run(&g, NodeId(0), NodeId(1), &mut a, &mut b, &SimConfig::new(100)).unwrap();
        assert_eq!(r.outcome, RunOutcome::Met { round: 3 });
    }

    #[test]
    fn invalid_inputs() {
        let g = edge();
        assert_eq!(
            run(&g, NodeId(0), NodeId(7), &mut Idle, &mut Idle, &SimConfig::new(3)),
            Err(SimError::InvalidStart { node: NodeId(7), n: 2 })
        );
        assert_eq!(
            run(&g, NodeId(0), NodeId(1), &mut Idle, &mut Idle, &SimConfig::new(0)),
            Err(SimError::ZeroRoundCap)
        );
    }

    #[test]
    fn meeting_only_detail_keeps_no_rows() {
        let g = edge();
        let cfg = SimConfig::new(100).with_detail(TraceDetail::MeetingOnly);
        let r = run(
            &g,
            NodeId(0),
            NodeId(1),
            &mut RendezvousProgram::new(0),
            &mut RendezvousProgram::new(1),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.met_round(), Some(3));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn default_cap_formula() {
        assert_eq!(default_round_cap(4, 3, 2), 16 * 4 * (3 + 4 + 4));
        assert_eq!(default_round_cap(1000, 1000, 64), HARD_ROUND_CEILING);
    }
}
