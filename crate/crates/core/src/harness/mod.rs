//! Experiment harness: parameter sweeps, acceptance checks and the `rvsim`
//! command line.

pub mod acceptance;
pub mod cli;
pub mod sweep;

use crate::agent::{bit_length, Label, RendezvousProgram};
use crate::graph::{NodeId, PortGraph};
use crate::sim::{default_round_cap, run, RunResult, SimConfig, SimError};

/// `8Δ(2D + 4k + 3)` where `k` is the smaller label bit length: an explicit
/// upper bound on the meeting round of the rendezvous program.
pub fn analytic_bound(max_degree: usize, distance: u32, label1: Label, label2: Label) -> u64 {
    let k = bit_length(label1).min(bit_length(label2)) as u64;
    8 * max_degree as u64 * (2 * distance as u64 + 4 * k + 3)
}

/// Simulator default cap for two rendezvous agents.
pub fn rendezvous_cap(g: &PortGraph, distance: u32, label1: Label, label2: Label) -> u64 {
    let k_max = bit_length(label1).max(bit_length(label2));
    default_round_cap(g.max_degree(), distance, k_max)
}

/// Runs the rendezvous program with labels `label1` and `label2`.
pub fn run_rendezvous(
    g: &PortGraph,
    starts: (NodeId, NodeId),
    labels: (Label, Label),
    cfg: &SimConfig,
) -> Result<RunResult, SimError> {
    run(
        g,
        starts.0,
        starts.1,
        &mut RendezvousProgram::new(labels.0),
        &mut RendezvousProgram::new(labels.1),
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_uses_shorter_label() {
        // Δ=3, D=2, labels 2 (2 bits) and 5 (3 bits): 24·(4 + 8 + 3)
        assert_eq!(analytic_bound(3, 2, 2, 5), 360);
        assert_eq!(analytic_bound(1, 1, 0, 1), 8 * (2 + 4 + 3));
    }
}
