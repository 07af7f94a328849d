//! The agent side of the world: what an agent observes each round, what it
//! answers, and the rendezvous algorithm itself.

pub mod label;
pub mod rendezvous;

use serde::{Deserialize, Serialize};

use crate::graph::Port;
use crate::oracle::DistanceReading;

pub use label::{bit_length, distinguishing_index, extend_label, ExtendedLabel, Label, LabelError};
pub use rendezvous::{Phase, ProcedureEvent, RendezvousProgram};

/// Everything an agent learns at the start of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    /// Degree of the node the agent stands on.
    pub degree: usize,
    /// Port through which the agent entered this node last round, 0 if it stayed.
    pub arrival_port: Port,
    /// This round's distance reading.
    pub reading: DistanceReading,
    /// Set once, after the agents have met; the program should halt.
    pub met: bool,
}

/// The port an agent leaves by. 0, or any port above the degree, means stay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub port: Port,
}

impl Action {
    pub const STAY: Action = Action { port: 0 };

    pub fn port(port: Port) -> Self {
        Action { port }
    }
}

/// A deterministic, resumable agent: one observation in, one action out, per
/// round.
pub trait AgentProgram {
    fn step(&mut self, obs: &Observation) -> Action;
}

impl<T: AgentProgram + ?Sized> AgentProgram for Box<T> {
    fn step(&mut self, obs: &Observation) -> Action {
        (**self).step(obs)
    }
}

impl<T: AgentProgram + ?Sized> AgentProgram for &mut T {
    fn step(&mut self, obs: &Observation) -> Action {
        (**self).step(obs)
    }
}

/// Always leaves by the same port.
#[derive(Debug, Clone, Copy)]
pub struct FixedPort(pub Port);

impl AgentProgram for FixedPort {
    fn step(&mut self, _obs: &Observation) -> Action {
        Action::port(self.0)
    }
}

/// Never moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct Idle;

impl AgentProgram for Idle {
    fn step(&mut self, _obs: &Observation) -> Action {
        Action::STAY
    }
}
