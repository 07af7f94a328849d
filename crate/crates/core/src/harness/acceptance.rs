//! Acceptance checks, shared by the `acceptance` test target and `rvsim
//! selfcheck`. Each check returns a [`CriterionReport`]; the `*_violation`
//! predicates are also driven by the property-test suites.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sweep::{instantiate, run_sweep, Family, Numbering, SweepSpec, SweepSummary};
use super::{rendezvous_cap, run_rendezvous};
use crate::adversary::{build_instance, number_butterfly, verify_frozen_distance, LabelSpace};
use crate::agent::{Label, ProcedureEvent, RendezvousProgram};
use crate::ceil_log2;
use crate::graph::generators::butterfly_vertex;
use crate::graph::{
    generate_caterpillar, generate_random_connected, generate_ring, CaterpillarPolicy, NodeId,
    PortGraph, RingNumbering,
};
use crate::oracle::{all_pairs, DistanceOracle, OracleMode};
use crate::sim::{run, RunOutcome, RunResult, SimConfig};

/// Labels the upper-bound corpus draws its pairs from.
pub const CORPUS_LABELS: [Label; 7] = [0, 1, 2, 3, 5, 1 << 10, (1 << 16) - 1];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] criterion {}: {}: {}", self.id, self.name, self.detail)
    }
}

fn report(id: u8, name: &'static str, failures: &[String], detail: String) -> CriterionReport {
    let detail = match failures.first() {
        None => detail,
        Some(first) => format!("{detail}; {} failure(s), first: {first}", failures.len()),
    };
    CriterionReport {
        id,
        name,
        passed: failures.is_empty(),
        detail,
    }
}

fn corpus_pairs() -> Vec<(Label, Label)> {
    let mut pairs = Vec::new();
    for (i, &a) in CORPUS_LABELS.iter().enumerate() {
        for &b in &CORPUS_LABELS[i + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Caterpillars under both policies, butterflies, rotated rings and seeded
/// random graphs.
pub fn upper_bound_corpus() -> Vec<SweepSpec> {
    let all = corpus_pairs();
    let some = vec![(0, 1), (2, 5), (3, 1 << 10), (5, (1 << 16) - 1), (1, (1 << 16) - 1)];
    let mut specs = Vec::new();

    for numbering in [Numbering::Fixed, Numbering::Seeded] {
        let mut s = SweepSpec::new(Family::Caterpillar, some.clone());
        s.numbering = numbering;
        s.distances = vec![1, 2, 4, 8, 16];
        s.degrees = vec![3, 8, 16];
        s.seeds = vec![1];
        specs.push(s);
    }

    let mut s = SweepSpec::new(Family::Butterfly, some.clone());
    s.sizes = vec![3, 5, 13];
    s.distances = vec![2, 4];
    specs.push(s);

    let mut s = SweepSpec::new(Family::Ring, vec![(2, 3), (0, (1 << 16) - 1)]);
    s.numbering = Numbering::Seeded;
    s.seeds = vec![7];
    s.sizes = vec![6, 17, 32];
    s.distances = vec![3];
    s.all_rotations = true;
    specs.push(s);

    for (seed, &pair) in (0..10u64).zip(all.iter().cycle()) {
        let mut s = SweepSpec::new(Family::Random, vec![pair]);
        s.sizes = vec![24, 200];
        s.degrees = vec![3, 16];
        s.seeds = vec![seed];
        specs.push(s);
    }
    specs
}

pub fn check_upper_bound() -> CriterionReport {
    let rows = run_sweep(&upper_bound_corpus());
    let summary = SweepSummary::of(&rows);
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| r.violates_bound() || !r.error.is_empty())
        .map(|r| {
            format!(
                "{:?}/{} n={} D={} labels=({},{}) outcome={} rounds={} bound={} {}",
                r.family, r.variant, r.nodes, r.distance, r.label1, r.label2, r.outcome, r.rounds,
                r.analytic_bound, r.error
            )
        })
        .collect();
    let mut failures = failures;
    if rows.len() < 200 {
        failures.push(format!("corpus has only {} runs", rows.len()));
    }
    report(1, "upper-bound conformance", &failures, summary.to_string())
}

/// The two lower-bound instances: `(Δ, label space, D)`.
pub fn lower_bound_cases() -> [(usize, LabelSpace, u32); 2] {
    [
        (16, LabelSpace::auto(1 << 64), 4),
        (8, LabelSpace::explicit(1 << 20), 3),
    ]
}

pub fn check_lower_bound() -> CriterionReport {
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (degree, labels, distance) in lower_bound_cases() {
        let k = degree - 3;
        let outcome = build_instance(degree, labels, distance).and_then(|inst| {
            let v = verify_frozen_distance(&inst, None)?;
            Ok((inst, v))
        });
        match outcome {
            Ok((inst, v)) => {
                parts.push(format!(
                    "k={k} L=2^{} D={distance}: frozen={} t*={} required={}",
                    labels.log2_size(),
                    v.frozen_rounds(),
                    inst.horizon,
                    inst.guaranteed_horizon
                ));
                if v.frozen_rounds() < inst.guaranteed_horizon {
                    failures.push(format!("k={k}: frozen {} rounds", v.frozen_rounds()));
                }
            }
            Err(e) => failures.push(format!("k={k}: {e}")),
        }
    }
    report(2, "lower-bound reproduction", &failures, parts.join("; "))
}

pub fn check_caterpillar_cost() -> CriterionReport {
    let mut failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    let mut runs = 0;
    for d in [2u32, 4, 8] {
        for delta in [4usize, 8, 16] {
            let c = match generate_caterpillar(d as usize, delta, CaterpillarPolicy::Adversarial) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("D={d} Δ={delta}: {e}"));
                    continue;
                }
            };
            for labels in [(0, 1), (2, 5), (3, 1 << 10)] {
                runs += 1;
                let cap = rendezvous_cap(&c.graph, d, labels.0, labels.1);
                let r = run_rendezvous(&c.graph, c.starts, labels, &SimConfig::new(cap));
                let floor = d as u64 * (delta as u64 - 1);
                match r.map(|r| r.met_round()) {
                    Ok(Some(m)) if m >= floor => min_slack = min_slack.min(m as f64 / floor as f64),
                    Ok(m) => failures.push(format!(
                        "D={d} Δ={delta} labels={labels:?}: met {m:?} below D(Δ-1)={floor}"
                    )),
                    Err(e) => failures.push(format!("D={d} Δ={delta}: {e}")),
                }
            }
        }
    }
    report(
        3,
        "caterpillar cost",
        &failures,
        format!("{runs} runs, min measured/(D(Δ-1)) = {min_slack:.3}"),
    )
}

pub fn check_symmetry() -> CriterionReport {
    let mut failures = Vec::new();
    let cap = 100_000;
    for n in [6usize, 8] {
        let g = generate_ring(n, RingNumbering::Mirrored).expect("ring");
        let starts = (NodeId(0), NodeId(n / 2));
        for label in [5, 0, 1 << 10] {
            match run_rendezvous(&g, starts, (label, label), &SimConfig::new(cap)) {
                Ok(r) => {
                    let touched = r.trace.iter().any(|row| row.distance == 0);
                    if r.outcome != RunOutcome::CapReached || touched || r.rounds != cap {
                        failures.push(format!("n={n} label={label}: {:?}", r.outcome));
                    }
                }
                Err(e) => failures.push(format!("n={n}: {e}")),
            }
        }
    }
    report(
        4,
        "symmetry non-meeting",
        &failures,
        format!("rings 6 and 8, 3 labels each, cap {cap}"),
    )
}

/// Runs two rendezvous programs and hands them back for inspection.
pub fn co_run(
    g: &PortGraph,
    starts: (NodeId, NodeId),
    labels: (Label, Label),
    mode: OracleMode,
) -> (RunResult, RendezvousProgram, RendezvousProgram) {
    let distance = g.bfs_distances(starts.0)[starts.1.index()];
    let cap = rendezvous_cap(g, distance, labels.0, labels.1);
    let mut a = RendezvousProgram::new(labels.0);
    let mut b = RendezvousProgram::new(labels.1);
    let r = run(
        g,
        starts.0,
        starts.1,
        &mut a,
        &mut b,
        &SimConfig::new(cap).with_mode(mode),
    )
    .expect("valid starts");
    (r, a, b)
}

/// Kind and round of each event up to the start of CompareLabels.
fn boundaries(events: &[ProcedureEvent]) -> Vec<(u8, u64)> {
    let mut out = Vec::new();
    for e in events {
        let kind = match e {
            ProcedureEvent::BoundDegreesStart { .. } => 0,
            ProcedureEvent::BoundDegreesEnd { .. } => 1,
            ProcedureEvent::CompareLabelsStart { .. } => 2,
            ProcedureEvent::CompareLabelsEnd { .. } => break,
        };
        out.push((kind, e.round()));
        if kind == 2 {
            break;
        }
    }
    out
}

/// Both agents hit the same sub-procedure boundaries in the same rounds until
/// CompareLabels starts.
pub fn lockstep_violation(a: &RendezvousProgram, b: &RendezvousProgram) -> Option<String> {
    let (x, y) = (boundaries(a.events()), boundaries(b.events()));
    (x != y).then(|| format!("boundaries differ: {x:?} vs {y:?}"))
}

/// Co-running `BoundDegrees(1)` calls that both fail started on nodes whose
/// degrees lie in the same interval `(2^(j-1), 2^j]`.
pub fn similarity_violation(a: &RendezvousProgram, b: &RendezvousProgram) -> Option<String> {
    fn calls(events: &[ProcedureEvent]) -> Vec<(u64, bool, usize, u64, bool)> {
        let mut out = Vec::new();
        let mut open = None;
        for e in events {
            match *e {
                ProcedureEvent::BoundDegreesStart { round, bit, degree } => {
                    open = Some((round, bit, degree))
                }
                ProcedureEvent::BoundDegreesEnd { round, success } => {
                    if let Some((start, bit, degree)) = open.take() {
                        out.push((start, bit, degree, round, success));
                    }
                }
                _ => {}
            }
        }
        out
    }
    let (x, y) = (calls(a.events()), calls(b.events()));
    for ca in &x {
        for cb in &y {
            let co_running = ca.0 == cb.0 && ca.3 == cb.3;
            if co_running && ca.1 && cb.1 && !ca.4 && !cb.4 && ceil_log2(ca.2) != ceil_log2(cb.2) {
                return Some(format!(
                    "failed BoundDegrees(1) at round {} with degrees {} and {}",
                    ca.0, ca.2, cb.2
                ));
            }
        }
    }
    None
}

/// Either both agents leave CompareLabels in the same round with opposite
/// bits, or they met before either left it.
pub fn distinct_exit_violation(
    result: &RunResult,
    a: &RendezvousProgram,
    b: &RendezvousProgram,
) -> Option<String> {
    match (a.compare_exit(), b.compare_exit()) {
        (Some((ra, ba)), Some((rb, bb))) if ra == rb && ba != bb => None,
        (None, None) if result.met_round().is_some() => None,
        (x, y) => Some(format!("exits {x:?} and {y:?}, outcome {:?}", result.outcome)),
    }
}

/// Exact-value and delta-only oracles give identical runs.
pub fn delta_sufficiency_violation(
    g: &PortGraph,
    starts: (NodeId, NodeId),
    labels: (Label, Label),
) -> Option<String> {
    let (exact, ..) = co_run(g, starts, labels, OracleMode::ExactValue);
    let (delta, ..) = co_run(g, starts, labels, OracleMode::DeltaOnly);
    (exact != delta).then(|| {
        format!(
            "exact {:?} vs delta-only {:?}",
            exact.outcome, delta.outcome
        )
    })
}

/// Plain breadth-first search over the edge list.
fn reference_distances(g: &PortGraph, src: usize) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for (u, _, v, _) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![None; g.node_count()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Per-query BFS, the all-pairs table and the oracle agree on every pair.
pub fn oracle_equivalence_violation(g: &PortGraph) -> Option<String> {
    let table = match all_pairs(g, usize::MAX) {
        Ok(t) => t,
        Err(e) => return Some(e.to_string()),
    };
    let mut oracle = DistanceOracle::new(g, OracleMode::ExactValue);
    for u in g.nodes() {
        let reference = reference_distances(g, u.index());
        let bfs = g.bfs_distances(u);
        for v in g.nodes() {
            let want = reference[v.index()];
            let got = [bfs[v.index()], table.get(u, v), oracle.distance(u, v)];
            if got.iter().any(|&d| Some(d) != want) {
                return Some(format!("pair ({u}, {v}): reference {want:?}, got {got:?}"));
            }
        }
    }
    None
}

/// Every edge carries ports summing to `Δ+1`; `p1`/`p2` go one column
/// forward to rows `2i` and `2i+1`, `Δ+1-p1`/`Δ+1-p2` one column back, and all
/// other ports stay in the column.
pub fn paired_numbering_violation(k: usize, p: usize, p1: u32, p2: u32) -> Option<String> {
    let numbered = match number_butterfly(k, p, p1, p2) {
        Ok(n) => n,
        Err(e) => return Some(e.to_string()),
    };
    let g = numbered.graph();
    let delta = (k + 3) as u32;
    for (u, pu, v, pv) in g.edges() {
        if pu + pv != delta + 1 {
            return Some(format!("edge {u}:{pu} - {v}:{pv}"));
        }
    }
    for j in 0..p {
        for i in 0..k {
            let v = butterfly_vertex(k, i, j);
            if g.degree(v) != delta as usize {
                return Some(format!("degree {} at v({i},{j})", g.degree(v)));
            }
            for port in 1..=delta {
                let (w, _) = g.neighbor(v, port).expect("port in range");
                let (wi, wj) = (w.index() % k, w.index() / k);
                let ok = if port == p1 {
                    (wi, wj) == ((2 * i) % k, (j + 1) % p)
                } else if port == p2 {
                    (wi, wj) == ((2 * i + 1) % k, (j + 1) % p)
                } else if port == delta + 1 - p1 || port == delta + 1 - p2 {
                    wj == (j + p - 1) % p && g.neighbor(w, delta + 1 - port) == Some((v, port))
                } else {
                    wj == j
                };
                if !ok {
                    return Some(format!("port {port} at v({i},{j}) leads to v({wi},{wj})"));
                }
            }
        }
    }
    None
}

/// A small random connected graph with random starts and distinct labels.
pub fn random_case(rng: &mut ChaCha8Rng) -> (PortGraph, (NodeId, NodeId), (Label, Label)) {
    let n = rng.gen_range(2..=40);
    let max_degree = if n == 2 { 1 } else { rng.gen_range(2..=8) };
    let g = generate_random_connected(n, max_degree, rng.gen()).expect("valid parameters");
    let s1 = NodeId(rng.gen_range(0..n));
    let s2 = NodeId(rng.gen_range(0..n));
    let l1 = rng.gen_range(0..1 << 12);
    let mut l2 = rng.gen_range(0..1 << 12);
    if l2 == l1 {
        l2 += 1;
    }
    (g, (s1, s2), (l1, l2))
}

/// Mirrored rings and a single edge, each with its farthest start pair.
pub fn symmetric_fixtures() -> Vec<(PortGraph, (NodeId, NodeId))> {
    let edge = PortGraph::build(2, &[(0, 1, 1, 1)]).expect("single edge");
    let mut fixtures = vec![(edge, (NodeId(0), NodeId(1)))];
    for n in [6, 8] {
        let ring = generate_ring(n, RingNumbering::Mirrored).expect("ring");
        fixtures.push((ring, (NodeId(0), NodeId(n / 2))));
    }
    fixtures
}

pub fn check_protocol_properties(cases: usize) -> CriterionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut fails: [Vec<String>; 6] = Default::default();

    for _ in 0..cases {
        let (g, starts, labels) = random_case(&mut rng);
        let (_, a, b) = co_run(&g, starts, labels, OracleMode::ExactValue);
        fails[0].extend(lockstep_violation(&a, &b));
        fails[1].extend(similarity_violation(&a, &b));
        fails[3].extend(delta_sufficiency_violation(&g, starts, labels));
    }

    let mut exits = 0;
    let mut exit_checks = 0;
    for (g, starts) in symmetric_fixtures() {
        for l1 in 0..64 {
            for l2 in l1 + 1..64 {
                let (r, a, b) = co_run(&g, starts, (l1, l2), OracleMode::ExactValue);
                exit_checks += 1;
                exits += usize::from(a.compare_exit().is_some());
                fails[2].extend(distinct_exit_violation(&r, &a, &b));
            }
        }
    }

    let mut graphs = 0;
    for spec in upper_bound_corpus() {
        for cell in spec.cells() {
            if let Ok(cg) = instantiate(&cell) {
                if cg.graph.node_count() <= 64 {
                    graphs += 1;
                    fails[4].extend(oracle_equivalence_violation(&cg.graph));
                }
            }
        }
    }
    for _ in 0..cases {
        let (g, ..) = random_case(&mut rng);
        graphs += 1;
        fails[4].extend(oracle_equivalence_violation(&g));
    }

    for _ in 0..cases {
        let k = 2 * rng.gen_range(1..=7) + 1;
        let p = rng.gen_range(3.max(2 * (k as f64).log2() as usize)..=12);
        let half = (k as u32 + 3) / 2;
        let p1 = rng.gen_range(1..=half);
        let mut p2 = rng.gen_range(1..=half);
        if p2 == p1 {
            p2 = p1 % half + 1;
        }
        fails[5].extend(paired_numbering_violation(k, p, p1, p2));
    }

    let names = [
        "lockstep",
        "similarity",
        "distinct-exits",
        "delta-sufficiency",
        "oracle-equivalence",
        "paired-numbering",
    ];
    let failures: Vec<String> = names
        .iter()
        .zip(&fails)
        .flat_map(|(name, f)| f.iter().map(move |m| format!("{name}: {m}")))
        .collect();
    report(
        5,
        "protocol properties",
        &failures,
        format!(
            "{cases} random runs (lockstep, similarity, delta), {exit_checks} fixture pairs ({exits} with exits), {graphs} oracle graphs, {cases} butterfly numberings"
        ),
    )
}

/// Runs `rvsim` in-process twice per command and compares every output byte.
pub fn check_determinism(workdir: &Path) -> CriterionReport {
    let mut failures = Vec::new();
    let graph = workdir.join("det-graph.txt");
    let trace = workdir.join("det-trace.jsonl");
    let graph_s = graph.to_string_lossy().into_owned();
    let trace_s = trace.to_string_lossy().into_owned();

    let setup = [
        "rvsim", "generate", "caterpillar", "--distance", "4", "--degree", "4", "--out", &graph_s,
    ];
    let commands: [Vec<&str>; 3] = [
        vec!["rvsim", "generate", "butterfly", "--k", "5", "--p", "6"],
        vec![
            "rvsim", "run", "--graph", &graph_s, "--start1", "0", "--start2", "4", "--label1", "2",
            "--label2", "5", "--mode", "delta-only", "--trace-out", &trace_s,
        ],
        vec![
            "rvsim", "sweep", "--family", "ring", "--numbering", "seeded", "--seeds", "3",
            "--sizes", "8", "--distances", "4", "--label-pairs", "1:2,3:5", "--all-rotations",
        ],
    ];

    let mut sink = Vec::new();
    if super::cli::execute(setup, &mut sink, &mut Vec::new()) != 0 {
        failures.push("could not write the caterpillar graph".into());
    }
    for cmd in &commands {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = super::cli::execute(cmd.iter().copied(), &mut out, &mut err);
            let traced = std::fs::read(&trace).unwrap_or_default();
            let _ = std::fs::remove_file(&trace);
            outputs.push((code, out, err, traced));
        }
        if outputs[0] != outputs[1] {
            failures.push(format!("`{}` differs between runs", cmd[1..].join(" ")));
        }
        if outputs[0].0 != 0 {
            failures.push(format!("`{}` exited with {}", cmd[1..].join(" "), outputs[0].0));
        }
    }
    let _ = std::fs::remove_file(&graph);
    report(6, "determinism", &failures, "generate, run (with trace), sweep".into())
}

/// All criteria in order.
pub fn run_all(workdir: &Path) -> Vec<CriterionReport> {
    vec![
        check_upper_bound(),
        check_lower_bound(),
        check_caterpillar_cost(),
        check_symmetry(),
        check_protocol_properties(1000),
        check_determinism(workdir),
    ]
}
