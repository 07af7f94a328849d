//! JSON-lines trace files: one header record, one record per round, one result
//! record. Field order is fixed so equal runs give equal bytes.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{RunOutcome, RunResult, SimConfig, TraceRow};
use crate::agent::Label;
use crate::graph::io::graph_hash;
use crate::graph::{NodeId, PortGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub graph_hash: String,
    pub nodes: usize,
    pub starts: [NodeId; 2],
    pub labels: Option<[Label; 2]>,
    pub config: SimConfig,
}

impl TraceHeader {
    pub fn new(
        g: &PortGraph,
        starts: [NodeId; 2],
        labels: Option<[Label; 2]>,
        config: SimConfig,
    ) -> Self {
        TraceHeader {
            graph_hash: graph_hash(g),
            nodes: g.node_count(),
            starts,
            labels,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    #[serde(flatten)]
    pub outcome: RunOutcome,
    pub rounds: u64,
    pub final_positions: [NodeId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum TraceRecord {
    Header(TraceHeader),
    Row(TraceRow),
    Result(TraceSummary),
}

pub fn write_trace<W: Write>(w: &mut W, header: &TraceHeader, result: &RunResult) -> io::Result<()> {
    let mut emit = |rec: &TraceRecord| -> io::Result<()> {
        serde_json::to_writer(&mut *w, rec)?;
        w.write_all(b"\n")
    };
    emit(&TraceRecord::Header(header.clone()))?;
    for row in &result.trace {
        emit(&TraceRecord::Row(*row))?;
    }
    emit(&TraceRecord::Result(TraceSummary {
        outcome: result.outcome,
        rounds: result.rounds,
        final_positions: result.final_positions,
    }))
}

/// Parsed trace file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
    pub summary: TraceSummary,
}

pub fn read_trace<R: BufRead>(r: R) -> io::Result<TraceFile> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut header = None;
    let mut rows = Vec::new();
    let mut summary = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", i + 1)))?;
        match rec {
            TraceRecord::Header(h) => header = Some(h),
            TraceRecord::Row(row) => rows.push(row),
            TraceRecord::Result(s) => summary = Some(s),
        }
    }
    Ok(TraceFile {
        header: header.ok_or_else(|| bad("missing header record".into()))?,
        rows,
        summary: summary.ok_or_else(|| bad("missing result record".into()))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::RendezvousProgram;
    use crate::sim::run;

    #[test]
    fn round_trip_and_shape() {
        let g = PortGraph::build(2, &[(0, 1, 1, 1)]).unwrap();
        let cfg = SimConfig::new(10);
        let r = run(
            &g,
            NodeId(0),
            NodeId(1),
            &mut RendezvousProgram::new(0),
            &mut RendezvousProgram::new(1),
            &cfg,
        )
        .unwrap();
        let header = TraceHeader::new(&g, [NodeId(0), NodeId(1)], Some([0, 1]), cfg);
        let mut buf = Vec::new();
        write_trace(&mut buf, &header, &r).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("{\"record\":\"header\",\"graph_hash\":"));
        assert_eq!(text.lines().count(), r.trace.len() + 2);
        assert!(text
            .lines()
            .last()
            .unwrap()
            .starts_with("{\"record\":\"result\",\"outcome\":\"met\",\"round\":3"));

        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.header, header);
        assert_eq!(back.rows, r.trace);
    }
}
