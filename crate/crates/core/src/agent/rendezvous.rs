//! The rendezvous algorithm as a resumable state machine.
//!
//! Four nested procedures, each a sub-machine that is fed one round at a time:
//!
//! * [`TestPorts`]`(δ, b)`: for `i = 1..=δ`, leave by port `i·b`; stop with
//!   success if the distance dropped, otherwise walk back through the arrival
//!   port. Two rounds per iteration, so `2δ` rounds on failure.
//! * [`BoundDegrees`]`(b)`: at a node of degree `d`, idle through
//!   `TestPorts(2^l, 0)` for `l < ⌈log2 d⌉`, then `TestPorts(2^⌈log2 d⌉, b)`.
//! * [`CompareLabels`]: `BoundDegrees(bit_i)` over the extended label's bits,
//!   returning the first bit whose call succeeds.
//! * [`RendezvousProgram`]: `BoundDegrees(1)` while it succeeds, then
//!   `CompareLabels`, then `BoundDegrees(b)` forever.
//!
//! Control flow between rounds is free; only moves consume rounds. A
//! sub-machine that has just been created always answers with a move, so every
//! call to [`AgentProgram::step`] yields exactly one action.

use serde::{Deserialize, Serialize};

use super::label::{ExtendedLabel, Label};
use super::{Action, AgentProgram, Observation};
use crate::ceil_log2;
use crate::graph::Port;
use crate::oracle::{DistanceDelta, DistanceReading};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    Failure,
}

/// What a sub-machine sees in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundInput {
    pub round: u64,
    pub degree: usize,
    pub arrival_port: Port,
    /// Whether this round's distance is strictly below last round's.
    pub decreased: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step<T> {
    Move(Action),
    Done(T),
}

/// Turns per-round readings into the one comparison the algorithm makes.
#[derive(Debug, Clone, Default)]
struct ReadingTracker {
    last_exact: Option<u32>,
}

impl ReadingTracker {
    fn decreased(&mut self, reading: DistanceReading) -> bool {
        match reading {
            DistanceReading::Exact(d) => {
                let dropped = self.last_exact.is_some_and(|prev| d < prev);
                self.last_exact = Some(d);
                dropped
            }
            DistanceReading::Delta(delta) => delta == DistanceDelta::Decreased,
        }
    }

    fn input(&mut self, round: u64, obs: &Observation) -> RoundInput {
        RoundInput {
            round,
            degree: obs.degree,
            arrival_port: obs.arrival_port,
            decreased: self.decreased(obs.reading),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Awaiting {
    Start,
    Forward,
    Back,
}

#[derive(Debug, Clone)]
pub struct TestPorts {
    delta: u64,
    bit: bool,
    iteration: u64,
    awaiting: Awaiting,
}

impl TestPorts {
    pub fn new(delta: u64, bit: bool) -> Self {
        assert!(delta >= 1, "TestPorts needs delta >= 1");
        TestPorts {
            delta,
            bit,
            iteration: 1,
            awaiting: Awaiting::Start,
        }
    }

    pub fn advance(&mut self, input: &RoundInput) -> Step<Outcome> {
        match self.awaiting {
            Awaiting::Forward => {
                if input.decreased {
                    return Step::Done(Outcome::Success);
                }
                // Going back along the same edge.
                self.awaiting = Awaiting::Back;
                return Step::Move(Action::port(self.gated(input.arrival_port)));
            }
            Awaiting::Back => {
                self.iteration += 1;
                if self.iteration > self.delta {
                    return Step::Done(Outcome::Failure);
                }
            }
            Awaiting::Start => {}
        }
        self.awaiting = Awaiting::Forward;
        Step::Move(Action::port(self.gated(self.iteration as Port)))
    }

    fn gated(&self, port: Port) -> Port {
        if self.bit {
            port
        } else {
            0
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundDegrees {
    bit: bool,
    top: Option<u32>,
    level: u32,
    inner: Option<TestPorts>,
}

impl BoundDegrees {
    pub fn new(bit: bool) -> Self {
        BoundDegrees {
            bit,
            top: None,
            level: 0,
            inner: None,
        }
    }

    /// Rounds taken when every inner call fails, at a node of degree `degree`.
    pub fn failure_rounds(degree: usize) -> u64 {
        (1u64 << (ceil_log2(degree) + 2)) - 2
    }

    pub fn advance(&mut self, input: &RoundInput) -> Step<Outcome> {
        let top = *self.top.get_or_insert_with(|| ceil_log2(input.degree));
        loop {
            let level = self.level;
            let bit = self.bit && level == top;
            let inner = self
                .inner
                .get_or_insert_with(|| TestPorts::new(1u64 << level, bit));
            match inner.advance(input) {
                Step::Move(a) => return Step::Move(a),
                Step::Done(Outcome::Success) => return Step::Done(Outcome::Success),
                Step::Done(Outcome::Failure) if level == top => {
                    return Step::Done(Outcome::Failure)
                }
                Step::Done(Outcome::Failure) => {
                    self.level += 1;
                    self.inner = None;
                }
            }
        }
    }
}

/// Sub-procedure boundaries, stamped with the round in which they happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcedureEvent {
    BoundDegreesStart { round: u64, bit: bool, degree: usize },
    BoundDegreesEnd { round: u64, success: bool },
    CompareLabelsStart { round: u64 },
    /// `index` is the extended-label position that succeeded; `None` when the
    /// loop ran out and the fallback bit 1 was taken.
    CompareLabelsEnd { round: u64, bit: bool, index: Option<usize> },
}

impl ProcedureEvent {
    pub fn round(&self) -> u64 {
        match *self {
            ProcedureEvent::BoundDegreesStart { round, .. }
            | ProcedureEvent::BoundDegreesEnd { round, .. }
            | ProcedureEvent::CompareLabelsStart { round }
            | ProcedureEvent::CompareLabelsEnd { round, .. } => round,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct EventLog(Option<Vec<ProcedureEvent>>);

impl EventLog {
    fn push(&mut self, event: ProcedureEvent) {
        if let Some(events) = &mut self.0 {
            events.push(event);
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareLabels {
    label: ExtendedLabel,
    index: usize,
    inner: Option<BoundDegrees>,
}

impl CompareLabels {
    pub fn new(label: ExtendedLabel) -> Self {
        CompareLabels {
            label,
            index: 1,
            inner: None,
        }
    }

    /// Returns `(bit, Some(index))` on the first successful call, or
    /// `(true, None)` once every position has failed.
    pub fn advance(&mut self, input: &RoundInput) -> Step<(bool, Option<usize>)> {
        self.advance_logged(input, &mut EventLog::default())
    }

    fn advance_logged(
        &mut self,
        input: &RoundInput,
        log: &mut EventLog,
    ) -> Step<(bool, Option<usize>)> {
        loop {
            let bit = self.label.bit(self.index);
            match run_bound_degrees(&mut self.inner, bit, input, log) {
                Step::Move(a) => return Step::Move(a),
                Step::Done(Outcome::Success) => return Step::Done((bit, Some(self.index))),
                Step::Done(Outcome::Failure) if self.index == self.label.len() => {
                    return Step::Done((true, None))
                }
                Step::Done(Outcome::Failure) => {
                    self.index += 1;
                    self.inner = None;
                }
            }
        }
    }
}

/// Which part of the main procedure the agent is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// First loop: `BoundDegrees(1)` while it succeeds.
    Approach,
    CompareLabels,
    /// Second loop: `BoundDegrees(bit)` forever.
    Finish { bit: bool },
    Halted,
}

#[derive(Debug, Clone)]
enum Stage {
    Approach(Option<BoundDegrees>),
    Compare(CompareLabels),
    Finish(bool, Option<BoundDegrees>),
    Halted,
}

/// The full rendezvous algorithm for one agent.
///
/// Its behaviour depends only on the label and the observations it has been
/// fed. Readings are used solely to decide whether the distance dropped since
/// the previous round, so exact and delta-only oracles drive it identically.
#[derive(Debug, Clone)]
pub struct RendezvousProgram {
    label: ExtendedLabel,
    rounds: u64,
    readings: ReadingTracker,
    stage: Stage,
    log: EventLog,
    compare_exit: Option<(u64, bool)>,
}

impl RendezvousProgram {
    pub fn new(label: Label) -> Self {
        RendezvousProgram {
            label: ExtendedLabel::new(label),
            rounds: 0,
            readings: ReadingTracker::default(),
            stage: Stage::Approach(None),
            log: EventLog(Some(Vec::new())),
            compare_exit: None,
        }
    }

    /// Same program without the procedure event log (for bulk extraction).
    pub fn without_events(label: Label) -> Self {
        RendezvousProgram {
            log: EventLog(None),
            ..Self::new(label)
        }
    }

    pub fn label(&self) -> Label {
        self.label.label()
    }

    pub fn phase(&self) -> Phase {
        match self.stage {
            Stage::Approach(_) => Phase::Approach,
            Stage::Compare(_) => Phase::CompareLabels,
            Stage::Finish(bit, _) => Phase::Finish { bit },
            Stage::Halted => Phase::Halted,
        }
    }

    pub fn events(&self) -> &[ProcedureEvent] {
        self.log.0.as_deref().unwrap_or(&[])
    }

    /// Round at which CompareLabels returned, and the bit it returned.
    pub fn compare_exit(&self) -> Option<(u64, bool)> {
        self.compare_exit
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }
}

impl AgentProgram for RendezvousProgram {
    fn step(&mut self, obs: &Observation) -> Action {
        let round = self.rounds;
        self.rounds += 1;
        if obs.met {
            self.stage = Stage::Halted;
        }
        let input = self.readings.input(round, obs);
        let log = &mut self.log;
        loop {
            let next = match &mut self.stage {
                Stage::Halted => return Action::STAY,
                Stage::Approach(slot) => match run_bound_degrees(slot, true, &input, log) {
                    Step::Move(a) => return a,
                    Step::Done(Outcome::Success) => Stage::Approach(None),
                    Step::Done(Outcome::Failure) => {
                        log.push(ProcedureEvent::CompareLabelsStart { round });
                        Stage::Compare(CompareLabels::new(self.label.clone()))
                    }
                },
                Stage::Finish(bit, slot) => {
                    let bit = *bit;
                    match run_bound_degrees(slot, bit, &input, log) {
                        Step::Move(a) => return a,
                        Step::Done(_) => Stage::Finish(bit, None),
                    }
                }
                Stage::Compare(cl) => match cl.advance_logged(&input, log) {
                    Step::Move(a) => return a,
                    Step::Done((bit, index)) => {
                        log.push(ProcedureEvent::CompareLabelsEnd { round, bit, index });
                        self.compare_exit = Some((round, bit));
                        Stage::Finish(bit, None)
                    }
                },
            };
            self.stage = next;
        }
    }
}

fn run_bound_degrees(
    slot: &mut Option<BoundDegrees>,
    bit: bool,
    input: &RoundInput,
    log: &mut EventLog,
) -> Step<Outcome> {
    let bd = match slot {
        Some(bd) => bd,
        slot => {
            log.push(ProcedureEvent::BoundDegreesStart {
                round: input.round,
                bit,
                degree: input.degree,
            });
            slot.insert(BoundDegrees::new(bit))
        }
    };
    let step = bd.advance(input);
    if let Step::Done(outcome) = step {
        log.push(ProcedureEvent::BoundDegreesEnd {
            round: input.round,
            success: outcome == Outcome::Success,
        });
    }
    step
}
