//! Independent re-validation of a recorded trace against its graph.

use serde::Serialize;

use super::TraceRow;
use crate::graph::PortGraph;
use crate::oracle::DistanceOracle;
use crate::oracle::OracleMode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Row index does not follow the previous row.
    RoundGap { expected: u64, found: u64 },
    /// Start positions differ from the previous row's end positions.
    Continuity { agent: usize },
    NodeOutOfRange { agent: usize },
    /// End position or arrival port inconsistent with the chosen port.
    IllegalMove { agent: usize },
    DistanceMismatch { recorded: u32, actual: u32 },
    /// Distance changed by more than two between consecutive rows.
    DistanceJump { from: u32, to: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub row: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

/// Checks every row for legal moves, true distances and continuity. Returns all
/// violations found; an empty list means the trace is consistent.
pub fn replay_check(trace: &[TraceRow], g: &PortGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut oracle = DistanceOracle::new(g, OracleMode::ExactValue);
    let mut push = |row: usize, kind: ViolationKind| out.push(Violation { row, kind });

    for (i, row) in trace.iter().enumerate() {
        if let Some(prev) = i.checked_sub(1).map(|j| &trace[j]) {
            if row.round != prev.round + 1 {
                push(i, ViolationKind::RoundGap {
                    expected: prev.round + 1,
                    found: row.round,
                });
            }
            for agent in 0..2 {
                if row.start[agent] != prev.end[agent] {
                    push(i, ViolationKind::Continuity { agent });
                }
            }
            if row.distance.abs_diff(prev.distance) > 2 {
                push(i, ViolationKind::DistanceJump {
                    from: prev.distance,
                    to: row.distance,
                });
            }
        }

        let mut in_range = true;
        for agent in 0..2 {
            if !g.contains(row.start[agent]) || !g.contains(row.end[agent]) {
                push(i, ViolationKind::NodeOutOfRange { agent });
                in_range = false;
            }
        }
        if !in_range {
            continue;
        }

        for agent in 0..2 {
            let expected = match g.neighbor(row.start[agent], row.ports[agent]) {
                Some((next, entry)) => (next, entry),
                None => (row.start[agent], 0),
            };
            if (row.end[agent], row.arrivals[agent]) != expected {
                push(i, ViolationKind::IllegalMove { agent });
            }
        }

        let actual = oracle.distance(row.start[0], row.start[1]);
        if actual != row.distance {
            push(i, ViolationKind::DistanceMismatch {
                recorded: row.distance,
                actual,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::RendezvousProgram;
    use crate::graph::{generate_caterpillar, CaterpillarPolicy, NodeId};
    use crate::sim::{run, SimConfig};

    fn sample() -> (PortGraph, Vec<TraceRow>) {
        let c = generate_caterpillar(3, 3, CaterpillarPolicy::Adversarial).unwrap();
        let r = run(
            &c.graph,
            c.starts.0,
            c.starts.1,
            &mut RendezvousProgram::new(2),
            &mut RendezvousProgram::new(5),
            &SimConfig::new(5000),
        )
        .unwrap();
        assert!(r.met_round().is_some());
        (c.graph, r.trace)
    }

    #[test]
    fn fresh_trace_is_clean() {
        let (g, trace) = sample();
        assert_eq!(replay_check(&trace, &g), vec![]);
    }

    #[test]
    fn perturbed_distance_is_caught() {
        let (g, mut trace) = sample();
        trace[4].distance += 1;
        let v = replay_check(&trace, &g);
        assert!(v.iter().any(|v| v.row == 4
            && matches!(v.kind, ViolationKind::DistanceMismatch { .. })));
    }

    #[test]
    fn teleport_is_caught() {
        let (g, mut trace) = sample();
        let far = NodeId(g.node_count() - 1);
        trace[6].start[0] = far;
        let v = replay_check(&trace, &g);
        assert!(v
            .iter()
            .any(|v| v.row == 6 && v.kind == ViolationKind::Continuity { agent: 0 }));
    }
}
