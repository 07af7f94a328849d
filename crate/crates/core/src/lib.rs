//! Rendezvous of two distance-aware mobile agents on anonymous port-labeled
//! graphs.
//!
//! * [`graph`]: port graphs, the graph families used in experiments, and the
//!   text file format.
//! * [`oracle`]: the per-round distance device.
//! * [`agent`]: the observation/action contract and the rendezvous algorithm.
//! * [`sim`]: the synchronous two-agent round engine and trace tooling.
//! * [`adversary`]: constructive lower-bound instances.
//! * [`harness`]: sweeps, acceptance checks and the command line.

pub mod adversary;
pub mod agent;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod sim;

/// `⌈log2 x⌉`, with `⌈log2 0⌉ = ⌈log2 1⌉ = 0`.
pub fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}
