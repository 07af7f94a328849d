use rendezvous_sim::agent::rendezvous::{
    BoundDegrees, CompareLabels, Outcome, RoundInput, Step, TestPorts,
};
use rendezvous_sim::agent::{
    extend_label, Action, AgentProgram, ExtendedLabel, Idle, Observation, Phase,
    ProcedureEvent, RendezvousProgram,
};
use rendezvous_sim::graph::{generate_ring, NodeId, PortGraph, RingNumbering};
use rendezvous_sim::oracle::DistanceReading;
use rendezvous_sim::sim::{run, RunOutcome, SimConfig};

/// Feeds a sub-machine a world where the distance never changes, at a node of
/// the given degree where every move is reversible through the same port.
fn drive_frozen<T>(
    degree: usize,
    mut advance: impl FnMut(&RoundInput) -> Step<T>,
) -> (Vec<u32>, T) {
    let mut ports = Vec::new();
    let mut arrival = 0;
    for round in 0..10_000 {
        let input = RoundInput {
            round,
            degree,
            arrival_port: arrival,
            decreased: false,
        };
        match advance(&input) {
            Step::Move(a) => {
                ports.push(a.port);
                arrival = if (1..=degree as u32).contains(&a.port) { a.port } else { 0 };
            }
            Step::Done(out) => return (ports, out),
        }
    }
    panic!("sub-machine did not finish");
}

#[test]
fn test_ports_idle_bit() {
    let mut tp = TestPorts::new(4, false);
    let (ports, out) = drive_frozen(3, |i| tp.advance(i));
    assert_eq!(ports, vec![0; 8]);
    assert_eq!(out, Outcome::Failure);
}

#[test]
fn test_ports_at_degree_two() {
    let mut tp = TestPorts::new(4, true);
    let (ports, out) = drive_frozen(2, |i| tp.advance(i));
    // Ports 1 and 2 with go-backs, then 3 and 4 do not exist.
    assert_eq!(ports, vec![1, 1, 2, 2, 3, 0, 4, 0]);
    assert_eq!(out, Outcome::Failure);
}

#[test]
fn bound_degrees_failure_durations() {
    for (degree, rounds) in [(4, 14), (1, 2), (2, 6), (5, 30), (16, 62)] {
        let mut bd = BoundDegrees::new(true);
        let (ports, out) = drive_frozen(degree, |i| bd.advance(i));
        assert_eq!(out, Outcome::Failure);
        assert_eq!(ports.len() as u64, rounds, "degree {degree}");
        assert_eq!(BoundDegrees::failure_rounds(degree), rounds);
    }
}

#[test]
fn compare_labels_falls_through_when_distance_is_frozen() {
    let mut cl = CompareLabels::new(ExtendedLabel::new(5));
    let (ports, out) = drive_frozen(3, |i| cl.advance(i));
    assert_eq!(out, (true, None));
    // Six BoundDegrees calls at degree 3, 14 rounds each.
    assert_eq!(ports.len(), 6 * 14);
}

/// Runs one sub-machine as a full agent program; records its result.
struct Sub<M> {
    machine: M,
    last: Option<u32>,
    round: u64,
    result: Option<(u64, Outcome)>,
}

impl<M> Sub<M> {
    fn new(machine: M) -> Self {
        Sub {
            machine,
            last: None,
            round: 0,
            result: None,
        }
    }
}

impl AgentProgram for Sub<BoundDegrees> {
    fn step(&mut self, obs: &Observation) -> Action {
        let d = match obs.reading {
            DistanceReading::Exact(d) => d,
            DistanceReading::Delta(_) => unreachable!("exact mode only"),
        };
        let input = RoundInput {
            round: self.round,
            degree: obs.degree,
            arrival_port: obs.arrival_port,
            decreased: self.last.is_some_and(|prev| d < prev),
        };
        self.last = Some(d);
        self.round += 1;
        if self.result.is_some() || obs.met {
            return Action::STAY;
        }
        match self.machine.advance(&input) {
            Step::Move(a) => a,
            Step::Done(out) => {
                self.result = Some((input.round, out));
                Action::STAY
            }
        }
    }
}

fn edge() -> PortGraph {
    PortGraph::build(2, &[(0, 1, 1, 1)]).unwrap()
}

#[test]
fn test_ports_against_idle_peer_meets_in_one_round() {
    struct Once(TestPorts);
    impl AgentProgram for Once {
        fn step(&mut self, obs: &Observation) -> Action {
            let input = RoundInput {
                round: 0,
                degree: obs.degree,
                arrival_port: obs.arrival_port,
                decreased: false,
            };
            match self.0.advance(&input) {
                Step::Move(a) => a,
                Step::Done(_) => Action::STAY,
            }
        }
    }
    let r = run(
        &edge(),
        NodeId(0),
        NodeId(1),
        &mut Once(TestPorts::new(1, true)),
        &mut Idle,
        &SimConfig::new(10),
    )
    .unwrap();
    assert_eq!(r.outcome, RunOutcome::Met { round: 1 });
}

#[test]
fn mover_and_idler_at_similar_nodes_both_succeed() {
    let g = generate_ring(8, RingNumbering::Mirrored).unwrap();
    let mut a = Sub::new(BoundDegrees::new(true));
    let mut b = Sub::new(BoundDegrees::new(false));
    run(&g, NodeId(0), NodeId(4), &mut a, &mut b, &SimConfig::new(20)).unwrap();
    let (ra, oa) = a.result.unwrap();
    let (rb, ob) = b.result.unwrap();
    assert_eq!((oa, ob), (Outcome::Success, Outcome::Success));
    assert_eq!(ra, rb);
}

fn compare_exit(l1: u64, l2: u64) -> ((u64, bool), (u64, bool), Vec<ProcedureEvent>) {
    let g = generate_ring(8, RingNumbering::Mirrored).unwrap();
    let mut a = RendezvousProgram::new(l1);
    let mut b = RendezvousProgram::new(l2);
    run(&g, NodeId(0), NodeId(4), &mut a, &mut b, &SimConfig::new(10_000)).unwrap();
    (
        a.compare_exit().unwrap(),
        b.compare_exit().unwrap(),
        a.events().to_vec(),
    )
}

fn exit_index(events: &[ProcedureEvent]) -> Option<usize> {
    events.iter().find_map(|e| match e {
        ProcedureEvent::CompareLabelsEnd { index, .. } => *index,
        _ => None,
    })
}

#[test]
fn compare_labels_two_and_three() {
    let (a, b, events) = compare_exit(2, 3);
    assert_eq!(a.0, b.0);
    assert_eq!((a.1, b.1), (false, true));
    assert_eq!(exit_index(&events), Some(3));
}

#[test]
fn compare_labels_two_and_five() {
    let (a, b, events) = compare_exit(2, 5);
    assert_eq!(a.0, b.0);
    assert_ne!(a.1, b.1);
    assert_eq!(exit_index(&events), Some(4));
    let d = rendezvous_sim::agent::distinguishing_index(&extend_label(2), &extend_label(5));
    assert_eq!(d, Ok(4));
}

#[test]
fn single_edge_regression() {
    let mut a = RendezvousProgram::new(0);
    let mut b = RendezvousProgram::new(1);
    let r = run(&edge(), NodeId(0), NodeId(1), &mut a, &mut b, &SimConfig::new(100)).unwrap();
    assert_eq!(r.outcome, RunOutcome::Met { round: 3 });
    let last = r.trace.last().unwrap();
    assert_eq!(last.round, 2);
    assert_eq!(last.end[0], last.end[1]);
    assert_eq!(a.phase(), Phase::Halted);
    assert_eq!(b.phase(), Phase::Halted);
}

#[test]
fn equal_labels_on_mirrored_ring_never_meet() {
    let g = generate_ring(6, RingNumbering::Mirrored).unwrap();
    let r = run(
        &g,
        NodeId(0),
        NodeId(3),
        &mut RendezvousProgram::new(9),
        &mut RendezvousProgram::new(9),
        &SimConfig::new(5_000),
    )
    .unwrap();
    assert_eq!(r.outcome, RunOutcome::CapReached);
    assert!(r.trace.iter().all(|row| row.distance == 3));
}

#[test]
fn program_is_deterministic() {
    let g = generate_ring(8, RingNumbering::Random(4)).unwrap();
    let go = || {
        run(
            &g,
            NodeId(1),
            NodeId(6),
            &mut RendezvousProgram::new(12),
            &mut RendezvousProgram::new(40),
            &SimConfig::new(10_000),
        )
        .unwrap()
    };
    assert_eq!(go(), go());
}
