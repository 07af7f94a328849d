//! `rvsim` command line. Commands write to caller-supplied streams so they can
//! be driven in-process.
//!
//! Exit codes: 0 success, 1 a checked claim failed, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::acceptance;
use super::sweep::{run_sweep, write_csv, Family, Numbering, SweepSpec, SweepSummary};
use super::{analytic_bound, rendezvous_cap, run_rendezvous};
use crate::adversary::{build_instance, verify_frozen_distance, AdversaryError, LabelSpace};
use crate::agent::Label;
use crate::graph::generators::butterfly_vertex;
use crate::graph::io::{graph_hash, parse, to_text};
use crate::graph::{
    generate_butterfly, generate_caterpillar, generate_random_connected, generate_ring,
    CaterpillarPolicy, NodeId, PortGraph, RingNumbering,
};
use crate::oracle::OracleMode;
use crate::sim::trace::{write_trace, TraceHeader};
use crate::sim::{RunOutcome, SimConfig, TraceDetail};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SWEEP_HELP: &str = "CSV columns (fixed order):\n  family,variant,nodes,max_degree,distance,seed,offset,start1,start2,label1,label2,oracle_mode,rep,outcome,met_round,rounds,round_cap,analytic_bound,bound_ratio,error\n\nanalytic_bound is 8*max_degree*(2*distance + 4*k + 3), k the shorter label bit length; bound_ratio = met_round / analytic_bound.\nRows are sorted by cell parameters. Exit status 1 if any row exceeds its bound.";

#[derive(Debug, Parser)]
#[command(name = "rvsim", version, about = "Rendezvous of distance-aware agents on port-labeled graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated graph in the text graph format.
    Generate(GenerateArgs),
    /// Run two rendezvous agents on a graph file.
    Run(RunArgs),
    /// Run a parameter sweep and emit CSV.
    #[command(after_help = SWEEP_HELP)]
    Sweep(SweepArgs),
    /// Build and verify a lower-bound instance on the clique butterfly.
    Lowerbound(LowerboundArgs),
    /// Run the acceptance checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(subcommand)]
    family: GenerateFamily,
    /// Output file for the graph; standard output if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Adversarial,
    UniformRandom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RingNumberingArg {
    Mirrored,
    Random,
}

#[derive(Debug, Subcommand)]
enum GenerateFamily {
    /// Spine of D+1 nodes, every spine node padded with leaves to degree Δ.
    Caterpillar {
        #[arg(long)]
        distance: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "adversarial")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// k-clique-p-butterfly; starts are v(0,0) and v(0,p/2).
    Butterfly {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    Ring {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "mirrored")]
        numbering: RingNumberingArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random connected graph with a degree cap.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    ExactValue,
    DeltaOnly,
}

impl From<ModeArg> for OracleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ExactValue => OracleMode::ExactValue,
            ModeArg::DeltaOnly => OracleMode::DeltaOnly,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    start1: usize,
    #[arg(long)]
    start2: usize,
    #[arg(long)]
    label1: Label,
    #[arg(long)]
    label2: Label,
    #[arg(long, value_enum, default_value = "exact-value")]
    mode: ModeArg,
    /// Round cap; defaults to 16·Δ·(D + 2·k_max + 4), at most 10^6.
    #[arg(long)]
    cap: Option<u64>,
    /// Write the full trace as JSON lines.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

/// Comma-separated numbers and inclusive ranges `a-b`; `""` is empty.
#[derive(Debug, Clone, Default)]
struct NumList(Vec<u64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let num = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| format!("`{t}`: {e}"))
            };
            match item.split_once('-') {
                Some((a, b)) => out.extend(num(a)?..=num(b)?),
                None => out.push(num(item)?),
            }
        }
        Ok(NumList(out))
    }
}

/// Comma-separated `a:b` label pairs.
#[derive(Debug, Clone, Default)]
struct PairList(Vec<(Label, Label)>);

impl FromStr for PairList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|item| {
                let (a, b) = item
                    .split_once(':')
                    .ok_or_else(|| format!("`{item}` is not of the form a:b"))?;
                let p = |t: &str| t.trim().parse::<Label>().map_err(|e| format!("`{t}`: {e}"));
                Ok((p(a)?, p(b)?))
            })
            .collect::<Result<_, String>>()
            .map(PairList)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Caterpillar,
    Butterfly,
    Ring,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NumberingArg {
    Fixed,
    Seeded,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON sweep specification (or a list of them) instead of the flags below.
    #[arg(long, conflicts_with_all = ["family", "label_pairs", "label_range"])]
    spec: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "spec")]
    family: Option<FamilyArg>,
    /// fixed: adversarial caterpillar, mirrored ring, sorted butterfly; seeded: one numbering per seed.
    #[arg(long, value_enum, default_value = "fixed")]
    numbering: NumberingArg,
    /// Caterpillar spine length, butterfly column offset or ring start separation.
    #[arg(long, default_value = "")]
    distances: NumList,
    /// Caterpillar degree or random-graph degree cap.
    #[arg(long, default_value = "")]
    degrees: NumList,
    /// Butterfly k, ring n or random-graph n.
    #[arg(long, default_value = "")]
    sizes: NumList,
    #[arg(long, default_value = "")]
    seeds: NumList,
    /// Label pairs such as `2:5,0:1`.
    #[arg(long)]
    label_pairs: Option<PairList>,
    /// All pairs of distinct labels in the range, such as `0-7`.
    #[arg(long, conflicts_with = "label_pairs")]
    label_range: Option<NumList>,
    #[arg(long, value_enum, default_value = "exact-value")]
    oracle_mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Ring only: every rotation of the start pair.
    #[arg(long)]
    all_rotations: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `2^e` or a plain integer.
#[derive(Debug, Clone, Copy)]
struct LabelCount(u128);

impl FromStr for LabelCount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('^') {
            Some(("2", e)) => {
                let e: u32 = e.parse().map_err(|err| format!("`{e}`: {err}"))?;
                if e > 64 {
                    return Err("at most 2^64 labels".into());
                }
                Ok(LabelCount(1u128 << e))
            }
            Some(_) => Err(format!("`{s}`: only powers of 2 are supported")),
            None => s.parse().map(LabelCount).map_err(|e| format!("`{s}`: {e}")),
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("size").required(true).args(["k", "degree"]))]
struct LowerboundArgs {
    /// Clique size (odd, at least 3); Δ = k + 3.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    degree: Option<usize>,
    /// Label space size L, e.g. `2^64` or `1000`.
    #[arg(long)]
    labels: LabelCount,
    #[arg(long)]
    distance: u32,
    /// Sample this many labels instead of enumerating. Above 2^20 labels a
    /// sample of 4096 is used by default.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulation cap for the verification run.
    #[arg(long)]
    cap: Option<u64>,
    /// Write the numbered butterfly to this file.
    #[arg(long)]
    graph_out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Claim(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, out, err),
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Lowerbound(a) => cmd_lowerbound(a, out),
        Command::Selfcheck(a) => cmd_selfcheck(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Claim(msg)) => {
            let _ = writeln!(err, "claim violated: {msg}");
            EXIT_CLAIM
        }
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn usage<E: std::fmt::Display>(stage: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Usage(format!("{stage}: {e}"))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (graph, starts): (PortGraph, Option<(NodeId, NodeId)>) = match a.family {
        GenerateFamily::Caterpillar {
            distance,
            degree,
            policy,
            seed,
        } => {
            let policy = match policy {
                PolicyArg::Adversarial => CaterpillarPolicy::Adversarial,
                PolicyArg::UniformRandom => CaterpillarPolicy::UniformRandom(seed),
            };
            let c = generate_caterpillar(distance, degree, policy).map_err(usage("caterpillar"))?;
            (c.graph, Some(c.starts))
        }
        GenerateFamily::Butterfly { k, p } => {
            let b = generate_butterfly(k, p).map_err(usage("butterfly"))?;
            let starts = (butterfly_vertex(k, 0, 0), butterfly_vertex(k, 0, p / 2));
            (b.graph, Some(starts))
        }
        GenerateFamily::Ring { n, numbering, seed } => {
            let numbering = match numbering {
                RingNumberingArg::Mirrored => RingNumbering::Mirrored,
                RingNumberingArg::Random => RingNumbering::Random(seed),
            };
            (generate_ring(n, numbering).map_err(usage("ring"))?, None)
        }
        GenerateFamily::Random {
            n,
            max_degree,
            seed,
        } => (
            generate_random_connected(n, max_degree, seed).map_err(usage("random"))?,
            None,
        ),
    };

    let mut summary = format!(
        "nodes={} edges={} max_degree={}",
        graph.node_count(),
        graph.edge_count(),
        graph.max_degree()
    );
    if let Some((s1, s2)) = starts {
        summary.push_str(&format!(" starts={s1},{s2}"));
    }
    let text = to_text(&graph);
    match &a.out {
        Some(path) => {
            fs::write(path, text).map_err(usage("writing graph"))?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(text.as_bytes())?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(EXIT_OK)
}

fn read_graph(path: &Path) -> Result<PortGraph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct RunRecord {
    graph_hash: String,
    outcome: &'static str,
    met_round: Option<u64>,
    rounds: u64,
    final_positions: [NodeId; 2],
    distance: u32,
    round_cap: u64,
    analytic_bound: u64,
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> CmdResult {
    let g = read_graph(&a.graph)?;
    let starts = (NodeId(a.start1), NodeId(a.start2));
    for s in [starts.0, starts.1] {
        if !g.contains(s) {
            return Err(Failure::Usage(format!(
                "start node {s} is not in the graph ({} nodes)",
                g.node_count()
            )));
        }
    }
    let distance = g.bfs_distances(starts.0)[starts.1.index()];
    let cap = a
        .cap
        .unwrap_or_else(|| rendezvous_cap(&g, distance, a.label1, a.label2));
    let detail = if a.trace_out.is_some() {
        TraceDetail::Full
    } else {
        TraceDetail::MeetingOnly
    };
    let cfg = SimConfig::new(cap).with_mode(a.mode.into()).with_detail(detail);
    let labels = (a.label1, a.label2);
    let result = run_rendezvous(&g, starts, labels, &cfg).map_err(usage("run"))?;

    if let Some(path) = &a.trace_out {
        let header = TraceHeader::new(&g, [starts.0, starts.1], Some([labels.0, labels.1]), cfg);
        let mut buf = Vec::new();
        write_trace(&mut buf, &header, &result)?;
        fs::write(path, buf).map_err(usage("writing trace"))?;
    }
    let record = RunRecord {
        graph_hash: graph_hash(&g),
        outcome: match result.outcome {
            RunOutcome::Met { .. } => "met",
            RunOutcome::CapReached => "cap-reached",
        },
        met_round: result.met_round(),
        rounds: result.rounds,
        final_positions: result.final_positions,
        distance,
        round_cap: cap,
        analytic_bound: analytic_bound(g.max_degree(), distance, labels.0, labels.1),
    };
    writeln!(out, "{}", serde_json::to_string(&record).expect("serializable"))?;
    Ok(if result.met_round().is_some() {
        EXIT_OK
    } else {
        EXIT_CLAIM
    })
}

fn sweep_specs(a: &SweepArgs) -> Result<Vec<SweepSpec>, Failure> {
    if let Some(path) = &a.spec {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(usage("spec"))?;
        return if value.is_array() {
            serde_json::from_value(value).map_err(usage("spec"))
        } else {
            serde_json::from_value(value).map(|s| vec![s]).map_err(usage("spec"))
        };
    }
    let family = match a.family.expect("required by clap") {
        FamilyArg::Caterpillar => Family::Caterpillar,
        FamilyArg::Butterfly => Family::Butterfly,
        FamilyArg::Ring => Family::Ring,
        FamilyArg::Random => Family::Random,
    };
    let label_pairs = match (&a.label_pairs, &a.label_range) {
        (Some(p), _) => p.0.clone(),
        (None, Some(r)) => {
            let mut pairs = Vec::new();
            for (i, &x) in r.0.iter().enumerate() {
                for &y in &r.0[i + 1..] {
                    pairs.push((x, y));
                }
            }
            pairs
        }
        (None, None) => {
            return Err(Failure::Usage(
                "one of --label-pairs or --label-range is required".into(),
            ))
        }
    };
    let to_usize = |v: &NumList| v.0.iter().map(|&x| x as usize).collect::<Vec<_>>();
    let distances = a
        .distances
        .0
        .iter()
        .map(|&d| u32::try_from(d).map_err(|_| Failure::Usage(format!("distance {d} too large"))))
        .collect::<Result<_, _>>()?;
    Ok(vec![SweepSpec {
        family,
        numbering: match a.numbering {
            NumberingArg::Fixed => Numbering::Fixed,
            NumberingArg::Seeded => Numbering::Seeded,
        },
        distances,
        degrees: to_usize(&a.degrees),
        sizes: to_usize(&a.sizes),
        seeds: a.seeds.0.clone(),
        label_pairs,
        oracle_mode: a.oracle_mode.into(),
        repetitions: a.repetitions,
        all_rotations: a.all_rotations,
    }])
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let specs = sweep_specs(&a)?;
    let rows = with_pool(a.threads, || run_sweep(&specs))?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows).map_err(usage("csv"))?;
    match &a.out {
        Some(path) => fs::write(path, buf).map_err(usage("writing csv"))?,
        None => out.write_all(&buf)?,
    }
    let summary = SweepSummary::of(&rows);
    writeln!(err, "{summary}")?;
    if summary.violations > 0 {
        return Err(Failure::Claim(format!(
            "{} cell(s) exceeded the analytic bound",
            summary.violations
        )));
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LowerboundRecord {
    degree: usize,
    k: usize,
    p: usize,
    label_space: String,
    labels_examined: usize,
    surviving_labels: usize,
    distance: u32,
    p1: u32,
    p2: u32,
    label1: Label,
    label2: Label,
    start1: NodeId,
    start2: NodeId,
    extraction_horizon: usize,
    guaranteed_horizon: u64,
    horizon: u64,
    verified_horizon: u64,
    first_deviation: Option<u64>,
    rounds_simulated: u64,
    graph_hash: String,
}

fn cmd_lowerbound(a: LowerboundArgs, out: &mut dyn Write) -> CmdResult {
    let degree = match (a.k, a.degree) {
        (Some(k), _) => k + 3,
        (None, Some(d)) => d,
        (None, None) => unreachable!("clap requires one of --k and --degree"),
    };
    let size = a.labels.0;
    let space = match a.sample {
        Some(count) => LabelSpace::sampled(size, count, a.seed),
        None if size > crate::adversary::EXPLICIT_LABEL_CAP => {
            LabelSpace::sampled(size, crate::adversary::DEFAULT_SAMPLE_SIZE, a.seed)
        }
        None => LabelSpace::explicit(size),
    };
    let instance = with_pool(a.threads, || build_instance(degree, space, a.distance))?
        .map_err(usage("build"))?;
    if let Some(path) = &a.graph_out {
        fs::write(path, to_text(&instance.graph)).map_err(usage("writing graph"))?;
    }
    let verified = match verify_frozen_distance(&instance, a.cap) {
        Ok(v) => v,
        Err(e @ AdversaryError::HorizonViolated { .. }) => {
            return Err(Failure::Claim(format!("verify: {e}")))
        }
        Err(e) => return Err(Failure::Usage(format!("verify: {e}"))),
    };
    let label_space = if size.is_power_of_two() {
        format!("2^{}", size.trailing_zeros())
    } else {
        size.to_string()
    };
    let record = LowerboundRecord {
        degree,
        k: instance.k,
        p: instance.p,
        label_space,
        labels_examined: instance.labels_examined,
        surviving_labels: instance.surviving_labels,
        distance: instance.distance,
        p1: instance.p1,
        p2: instance.p2,
        label1: instance.label1,
        label2: instance.label2,
        start1: instance.start1,
        start2: instance.start2,
        extraction_horizon: instance.extraction_horizon,
        guaranteed_horizon: instance.guaranteed_horizon,
        horizon: instance.horizon,
        verified_horizon: verified.frozen_rounds(),
        first_deviation: verified.first_deviation,
        rounds_simulated: verified.rounds_simulated,
        graph_hash: graph_hash(&instance.graph),
    };
    writeln!(out, "{}", serde_json::to_string(&record).expect("serializable"))?;
    Ok(EXIT_OK)
}

fn cmd_selfcheck(a: SelfcheckArgs, out: &mut dyn Write) -> CmdResult {
    let workdir = std::env::temp_dir().join(format!("rvsim-selfcheck-{}", std::process::id()));
    fs::create_dir_all(&workdir).map_err(usage("creating work directory"))?;
    let reports = with_pool(a.threads, || acceptance::run_all(&workdir))?;
    let _ = fs::remove_dir_all(&workdir);
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Claim(format!("{failed} criterion/criteria failed")));
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::COLUMNS;

    fn exec(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(
            std::iter::once("rvsim").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn help_lists_csv_columns() {
        assert!(SWEEP_HELP.contains(&COLUMNS.join(",")));
    }

    #[test]
    fn lists_and_pairs_parse() {
        assert_eq!("1-3,7".parse::<NumList>().unwrap().0, vec![1, 2, 3, 7]);
        assert_eq!("".parse::<NumList>().unwrap().0, Vec::<u64>::new());
        assert_eq!("5-4".parse::<NumList>().unwrap().0, Vec::<u64>::new());
        assert!("x".parse::<NumList>().is_err());
        assert_eq!("2:5, 0:1".parse::<PairList>().unwrap().0, vec![(2, 5), (0, 1)]);
        assert!("2-5".parse::<PairList>().is_err());
        assert_eq!("2^64".parse::<LabelCount>().unwrap().0, 1 << 64);
        assert_eq!("1000".parse::<LabelCount>().unwrap().0, 1000);
        assert!("3^4".parse::<LabelCount>().is_err());
        assert!("2^65".parse::<LabelCount>().is_err());
    }

    #[test]
    fn generate_to_stdout() {
        let (code, out, err) = exec(&["generate", "caterpillar", "--distance", "2", "--degree", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("8 7\n"));
        assert_eq!(err.trim(), "nodes=8 edges=7 max_degree=3 starts=0,2");
    }

    #[test]
    fn invalid_butterfly_is_a_usage_error() {
        let (code, out, err) = exec(&["generate", "butterfly", "--k", "4", "--p", "6"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("odd"), "{err}");
    }

    #[test]
    fn missing_arguments_are_usage_errors() {
        assert_eq!(exec(&["run"]).0, EXIT_USAGE);
        assert_eq!(exec(&["lowerbound", "--labels", "4", "--distance", "2"]).0, EXIT_USAGE);
        assert_eq!(exec(&["sweep", "--family", "ring"]).0, EXIT_USAGE);
        assert_eq!(exec(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn lowerbound_rejects_even_k() {
        let (code, _, err) = exec(&["lowerbound", "--k", "4", "--labels", "4", "--distance", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("build"), "{err}");
    }
}
