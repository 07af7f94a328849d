//! Constructive lower-bound instances.
//!
//! On a `Δ`-regular graph whose edges all carry port pairs `{q, Δ+1-q}`, an
//! agent whose distance reading never changes sees the same thing in every
//! round: degree `Δ`, arrival port `Δ+1-x`, distance `D`. Its exit ports are
//! then a fixed function of its label, which can be computed offline
//! ([`extract_port_sequence`]). The pipeline picks the two least used port
//! pairs as bridges between butterfly columns ([`choose_ports`]), finds two
//! labels that step forward and backward in the same rounds for as long as
//! possible ([`find_label_pair`]), numbers the butterfly accordingly
//! ([`number_butterfly`]) and checks by simulation that the distance stays
//! frozen ([`verify_frozen_distance`]).

mod butterfly;
mod caterpillar;

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agent::{AgentProgram, Label, Observation, RendezvousProgram};
use crate::ceil_log2;
use crate::graph::generators::{butterfly_vertex, check_butterfly_params};
use crate::graph::{GraphError, NodeId, PairedNumbering, Port, PortGraph};
use crate::oracle::{DistanceOracle, DistanceReading, OracleMode};
use crate::sim::{run, SimConfig, SimError};

pub use butterfly::{hamiltonian_decomposition, number_butterfly};
pub use caterpillar::caterpillar_adversarial_numbering;

/// Largest label space enumerated label by label.
pub const EXPLICIT_LABEL_CAP: u128 = 1 << 20;

/// Labels drawn when the label space is sampled and no count is given.
pub const DEFAULT_SAMPLE_SIZE: usize = 4096;

/// Port sequences are stored one byte per round.
pub const MAX_EXTRACTION_DEGREE: usize = u8::MAX as usize;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degree {0} leaves fewer than two port pairs")]
    DegenerateDelta(usize),
    #[error("need at least two candidate labels, have {0}")]
    TooFewLabels(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("distance left D after {observed} rounds, before the promised {expected}")]
    HorizonViolated { expected: u64, observed: u64 },
}

/// Exit ports chosen by one label's program in the constant-distance world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortSequence {
    pub label: Label,
    pub ports: Vec<u8>,
}

/// Runs the program for `label` at a virtual vertex of degree `degree` where
/// every reading is `distance` and leaving by `x` means arriving by
/// `degree + 1 - x`. Out-of-range ports are recorded as 0.
pub fn extract_port_sequence<P, F>(
    make: &F,
    label: Label,
    degree: usize,
    distance: u32,
    horizon: usize,
) -> PortSequence
where
    P: AgentProgram,
    F: Fn(Label) -> P + ?Sized,
{
    assert!(degree <= MAX_EXTRACTION_DEGREE, "degree {degree} too large for extraction");
    let mut program = make(label);
    let mut ports = Vec::with_capacity(horizon);
    let mut arrival: Port = 0;
    for _ in 0..horizon {
        let action = program.step(&Observation {
            degree,
            arrival_port: arrival,
            reading: DistanceReading::Exact(distance),
            met: false,
        });
        let port = action.port;
        if (1..=degree as Port).contains(&port) {
            ports.push(port as u8);
            arrival = degree as Port + 1 - port;
        } else {
            ports.push(0);
            arrival = 0;
        }
    }
    PortSequence { label, ports }
}

/// Port-pair class `min(x, Δ+1-x)` of an exit port, or `None` for a stay.
fn pair_class(port: u8, degree: usize) -> Option<usize> {
    let x = port as usize;
    (x != 0).then(|| x.min(degree + 1 - x))
}

/// Forward (`A`), backward (`B`) or in-place (`C`) per round.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassString(Vec<u8>);

impl ClassString {
    pub fn new(seq: &PortSequence, p1: Port, p2: Port, degree: usize) -> Self {
        let forward = [p1 as usize, p2 as usize];
        let backward = [degree + 1 - p1 as usize, degree + 1 - p2 as usize];
        ClassString(
            seq.ports
                .iter()
                .map(|&x| {
                    let x = x as usize;
                    if forward.contains(&x) {
                        b'A'
                    } else if backward.contains(&x) {
                        b'B'
                    } else {
                        b'C'
                    }
                })
                .collect(),
        )
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length of the common prefix with `other`.
    pub fn agreement(&self, other: &ClassString) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Display for ClassString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("ASCII"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortChoice {
    pub p1: Port,
    pub p2: Port,
    /// `S_q` for `q = 1..=Δ/2`: number of `(round, label)` pairs using port `q`
    /// or `Δ+1-q`.
    pub pair_counts: Vec<u64>,
    /// Labels using the chosen four ports at most `8t/Δ` times.
    pub surviving: Vec<Label>,
}

/// Picks the two least used port pairs (ties go to the smaller pair) and the
/// labels that use them rarely.
pub fn choose_ports(sequences: &[PortSequence], degree: usize) -> Result<PortChoice, AdversaryError> {
    let half = degree / 2;
    if degree % 2 == 1 || half < 2 {
        return Err(AdversaryError::DegenerateDelta(degree));
    }
    let horizon = sequences.first().map_or(0, |s| s.ports.len());
    if sequences.iter().any(|s| s.ports.len() != horizon) {
        return Err(AdversaryError::InvalidParams(
            "port sequences have different lengths".into(),
        ));
    }

    let mut pair_counts = vec![0u64; half];
    for seq in sequences {
        for &x in &seq.ports {
            if let Some(q) = pair_class(x, degree) {
                pair_counts[q - 1] += 1;
            }
        }
    }
    let mut ranked: Vec<usize> = (1..=half).collect();
    ranked.sort_by_key(|&q| (pair_counts[q - 1], q));
    let (p1, p2) = (ranked[0], ranked[1]);

    let surviving = sequences
        .iter()
        .filter(|seq| {
            let used = seq
                .ports
                .iter()
                .filter(|&&x| matches!(pair_class(x, degree), Some(q) if q == p1 || q == p2))
                .count();
            // used <= 8t/Δ
            used * degree <= 8 * horizon
        })
        .map(|seq| seq.label)
        .collect();

    Ok(PortChoice {
        p1: p1 as Port,
        p2: p2 as Port,
        pair_counts,
        surviving,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LabelPair {
    pub label1: Label,
    pub label2: Label,
    /// Rounds for which the two class strings agree.
    pub agreement: usize,
}

/// The pair of labels whose class strings share the longest prefix. Ties go to
/// the lexicographically smallest `(label1, label2)`.
pub fn find_label_pair(
    sequences: &[PortSequence],
    p1: Port,
    p2: Port,
    degree: usize,
) -> Result<LabelPair, AdversaryError> {
    if sequences.len() < 2 {
        return Err(AdversaryError::TooFewLabels(sequences.len()));
    }
    let mut classed: Vec<(ClassString, Label)> = sequences
        .par_iter()
        .map(|s| (ClassString::new(s, p1, p2, degree), s.label))
        .collect();
    classed.par_sort_unstable();

    // The longest common prefix in a set is attained by neighbors in sorted order.
    let mut best: Option<LabelPair> = None;
    for pair in classed.windows(2) {
        let agreement = pair[0].0.agreement(&pair[1].0);
        let (a, b) = (pair[0].1.min(pair[1].1), pair[0].1.max(pair[1].1));
        let candidate = LabelPair {
            label1: a,
            label2: b,
            agreement,
        };
        best = Some(match best {
            None => candidate,
            Some(cur)
                if agreement > cur.agreement
                    || (agreement == cur.agreement && (a, b) < (cur.label1, cur.label2)) =>
            {
                candidate
            }
            Some(cur) => cur,
        });
    }
    Ok(best.expect("at least one adjacent pair"))
}

/// Which labels of `0..size` take part in the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LabelSelection {
    All,
    /// `count` distinct labels drawn uniformly with a seeded RNG.
    Sample { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LabelSpace {
    /// `L`: labels are `0..size`. At most `2^64`.
    pub size: u128,
    pub selection: LabelSelection,
}

impl LabelSpace {
    pub fn explicit(size: u128) -> Self {
        LabelSpace {
            size,
            selection: LabelSelection::All,
        }
    }

    pub fn sampled(size: u128, count: usize, seed: u64) -> Self {
        LabelSpace {
            size,
            selection: LabelSelection::Sample { count, seed },
        }
    }

    /// Every label up to [`EXPLICIT_LABEL_CAP`], a default sample beyond.
    pub fn auto(size: u128) -> Self {
        if size <= EXPLICIT_LABEL_CAP {
            Self::explicit(size)
        } else {
            Self::sampled(size, DEFAULT_SAMPLE_SIZE, 0)
        }
    }

    pub fn labels(&self) -> Result<Vec<Label>, AdversaryError> {
        let max = u64::MAX as u128 + 1;
        if self.size < 2 || self.size > max {
            return Err(AdversaryError::InvalidParams(format!(
                "label space size must be in 2..=2^64 (got {})",
                self.size
            )));
        }
        match self.selection {
            LabelSelection::All => {
                if self.size > EXPLICIT_LABEL_CAP {
                    return Err(AdversaryError::InvalidParams(format!(
                        "{} labels exceed the explicit cap of {EXPLICIT_LABEL_CAP}; sample instead",
                        self.size
                    )));
                }
                Ok((0..self.size as u64).collect())
            }
            LabelSelection::Sample { count, seed } => {
                let count = (count as u128).min(self.size) as usize;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked = BTreeSet::new();
                while picked.len() < count {
                    let label = if self.size == max {
                        rng.gen::<u64>()
                    } else {
                        rng.gen_range(0..self.size as u64)
                    };
                    picked.insert(label);
                }
                Ok(picked.into_iter().collect())
            }
        }
    }

    pub fn log2_size(&self) -> f64 {
        (self.size as f64).log2()
    }
}

/// `⌊log2 L / (2 log2 Δ)⌋ · ⌊Δ/8⌋`: the number of frozen rounds the
/// construction guarantees.
pub fn guaranteed_horizon(label_space: u128, degree: usize) -> u64 {
    let ratio = (label_space as f64).log2() / (2.0 * (degree as f64).log2());
    ratio.floor() as u64 * (degree as u64 / 8)
}

/// Extraction length: `⌈log2 L / (2 log2 Δ)⌉ · ⌈Δ/8⌉ + 8Δ`.
pub fn extraction_horizon(label_space: u128, degree: usize) -> usize {
    let ratio = (label_space as f64).log2() / (2.0 * (degree as f64).log2());
    ratio.ceil() as usize * degree.div_ceil(8) + 8 * degree
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversaryInstance {
    pub degree: usize,
    pub k: usize,
    pub p: usize,
    pub label_space: LabelSpace,
    pub distance: u32,
    pub p1: Port,
    pub p2: Port,
    pub label1: Label,
    pub label2: Label,
    #[serde(skip)]
    pub graph: PortGraph,
    pub start1: NodeId,
    pub start2: NodeId,
    /// Rounds for which the chosen labels' class strings agree.
    pub horizon: u64,
    pub extraction_horizon: usize,
    pub guaranteed_horizon: u64,
    pub labels_examined: usize,
    pub surviving_labels: usize,
    pub pair_counts: Vec<u64>,
}

impl AdversaryInstance {
    pub fn paired(&self) -> Result<PairedNumbering, GraphError> {
        PairedNumbering::new(self.graph.clone())
    }
}

/// Ring length used for an instance: `2(D + ⌈log2 k⌉)`.
pub fn ring_length(k: usize, distance: u32) -> usize {
    2 * (distance as usize + ceil_log2(k) as usize)
}

/// Full pipeline for the rendezvous algorithm.
pub fn build_instance(
    degree: usize,
    labels: LabelSpace,
    distance: u32,
) -> Result<AdversaryInstance, AdversaryError> {
    build_instance_with(&RendezvousProgram::without_events, degree, labels, distance)
}

/// Full pipeline against any deterministic program family.
pub fn build_instance_with<P, F>(
    make: &F,
    degree: usize,
    labels: LabelSpace,
    distance: u32,
) -> Result<AdversaryInstance, AdversaryError>
where
    P: AgentProgram,
    F: Fn(Label) -> P + Sync,
{
    if degree < 6 || degree % 2 == 1 {
        return Err(AdversaryError::InvalidParams(format!(
            "degree must be k + 3 with k odd and at least 3 (got {degree})"
        )));
    }
    if degree > MAX_EXTRACTION_DEGREE {
        return Err(AdversaryError::InvalidParams(format!(
            "degree {degree} exceeds {MAX_EXTRACTION_DEGREE}"
        )));
    }
    let k = degree - 3;
    let min_distance = ceil_log2(k);
    if distance < min_distance {
        return Err(AdversaryError::InvalidParams(format!(
            "distance {distance} is below ceil(log2 k) = {min_distance}"
        )));
    }
    let p = ring_length(k, distance);
    check_butterfly_params(k, p)?;

    let candidates = labels.labels()?;
    let t = extraction_horizon(labels.size, degree);
    let sequences: Vec<PortSequence> = candidates
        .par_iter()
        .map(|&l| extract_port_sequence(make, l, degree, distance, t))
        .collect();

    let choice = choose_ports(&sequences, degree)?;
    let surviving: BTreeSet<Label> = choice.surviving.iter().copied().collect();
    let kept: Vec<PortSequence> = sequences
        .into_iter()
        .filter(|s| surviving.contains(&s.label))
        .collect();
    let pair = find_label_pair(&kept, choice.p1, choice.p2, degree)?;
    let numbered = number_butterfly(k, p, choice.p1, choice.p2)?;

    Ok(AdversaryInstance {
        degree,
        k,
        p,
        label_space: labels,
        distance,
        p1: choice.p1,
        p2: choice.p2,
        label1: pair.label1,
        label2: pair.label2,
        graph: numbered.into_graph(),
        start1: butterfly_vertex(k, 0, 0),
        start2: butterfly_vertex(k, 0, distance as usize),
        horizon: pair.agreement as u64,
        extraction_horizon: t,
        guaranteed_horizon: guaranteed_horizon(labels.size, degree),
        labels_examined: candidates.len(),
        surviving_labels: choice.surviving.len(),
        pair_counts: choice.pair_counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifiedHorizon {
    /// First round whose starting distance differs from `D`; `None` if the
    /// distance stayed at `D` for the whole simulation.
    pub first_deviation: Option<u64>,
    pub rounds_simulated: u64,
}

impl VerifiedHorizon {
    /// Number of rounds that began at distance exactly `D`.
    pub fn frozen_rounds(&self) -> u64 {
        self.first_deviation.unwrap_or(self.rounds_simulated + 1)
    }
}

/// Simulates the rendezvous program with the instance's labels and checks that
/// the distance stays at `D` for at least `instance.horizon` rounds.
pub fn verify_frozen_distance(
    instance: &AdversaryInstance,
    round_cap: Option<u64>,
) -> Result<VerifiedHorizon, AdversaryError> {
    verify_frozen_distance_with(&RendezvousProgram::new, instance, round_cap)
}

pub fn verify_frozen_distance_with<P, F>(
    make: &F,
    instance: &AdversaryInstance,
    round_cap: Option<u64>,
) -> Result<VerifiedHorizon, AdversaryError>
where
    P: AgentProgram,
    F: Fn(Label) -> P,
{
    let cap = round_cap.unwrap_or(2 * instance.extraction_horizon as u64 + 1);
    let mut a = make(instance.label1);
    let mut b = make(instance.label2);
    let g = &instance.graph;
    let result = run(
        g,
        instance.start1,
        instance.start2,
        &mut a,
        &mut b,
        &SimConfig::new(cap),
    )?;

    let mut first_deviation = result
        .trace
        .iter()
        .find(|row| row.distance != instance.distance)
        .map(|row| row.round);
    if first_deviation.is_none() {
        let mut oracle = DistanceOracle::new(g, OracleMode::ExactValue);
        let [x, y] = result.final_positions;
        if oracle.distance(x, y) != instance.distance {
            first_deviation = Some(result.rounds);
        }
    }
    let verified = VerifiedHorizon {
        first_deviation,
        rounds_simulated: result.rounds,
    };
    if verified.frozen_rounds() < instance.horizon {
        return Err(AdversaryError::HorizonViolated {
            expected: instance.horizon,
            observed: verified.frozen_rounds(),
        });
    }
    Ok(verified)
}
