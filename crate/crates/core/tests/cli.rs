use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn rvsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rvsim"))
        .args(args)
        .output()
        .expect("rvsim runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn generate_caterpillar_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.txt");
    let o = rvsim(&[
        "generate", "caterpillar", "--distance", "2", "--degree", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "nodes=8 edges=7 max_degree=3 starts=0,2");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("8 7\n"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn generate_butterfly_to_stdout() {
    let o = rvsim(&["generate", "butterfly", "--k", "3", "--p", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("12 36\n"));
    assert!(stderr(&o).contains("nodes=12 edges=36 max_degree=6"));
}

#[test]
fn generate_rejects_even_k() {
    let o = rvsim(&["generate", "butterfly", "--k", "4", "--p", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("odd"), "{}", stderr(&o));
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_single_edge_meets_at_regression_round() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "edge.txt", "2 1\n0 1 1 1\n");
    let o = rvsim(&[
        "run", "--graph", &g, "--start1", "0", "--start2", "1", "--label1", "0", "--label2", "1",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"], "met");
    assert_eq!(v["met_round"], 3);
}

#[test]
fn run_symmetric_ring_reaches_cap() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("ring.txt");
    let gen = rvsim(&["generate", "ring", "--n", "6", "--out", g.to_str().unwrap()]);
    assert!(gen.status.success());
    let o = rvsim(&[
        "run", "--graph", g.to_str().unwrap(), "--start1", "0", "--start2", "3", "--label1", "5",
        "--label2", "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"], "cap-reached");
}

#[test]
fn run_parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "bad.txt", "3 2\n0 1 1 1\n1 x 2 1\n");
    let o = rvsim(&[
        "run", "--graph", &g, "--start1", "0", "--start2", "2", "--label1", "0", "--label2", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn run_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("rand.txt");
    rvsim(&[
        "generate", "random", "--n", "30", "--max-degree", "5", "--seed", "11", "--out",
        g.to_str().unwrap(),
    ]);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let trace = dir.path().join(format!("trace{i}.jsonl"));
        let o = rvsim(&[
            "run", "--graph", g.to_str().unwrap(), "--start1", "0", "--start2", "17", "--label1",
            "6", "--label2", "9", "--trace-out", trace.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push((o.stdout, fs::read(&trace).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let trace = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert!(trace.lines().next().unwrap().starts_with("{\"record\":\"header\""));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn caterpillar_sweep_stays_within_bound() {
    let o = rvsim(&[
        "sweep", "--family", "caterpillar", "--distances", "1-8", "--degrees", "3,4,8",
        "--label-pairs", "2:5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let ratio = header.iter().position(|c| *c == "bound_ratio").unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 24);
    for row in &rows {
        assert!(row[ratio].parse::<f64>().unwrap() <= 1.0);
    }
    assert!(stderr(&o).contains("violations=0"));
}

#[test]
fn sweep_grows_at_most_linearly_in_distance() {
    let o = rvsim(&[
        "sweep", "--family", "caterpillar", "--distances", "2,4,8", "--degrees", "4",
        "--label-pairs", "2:5",
    ]);
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let met = header.iter().position(|c| *c == "met_round").unwrap();
    let rounds: Vec<f64> = csv_rows(&text).iter().map(|r| r[met].parse().unwrap()).collect();
    assert_eq!(rounds.len(), 3);
    for w in rounds.windows(2) {
        assert!(w[1] >= w[0] && w[1] / w[0] <= 3.0, "{rounds:?}");
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let o = rvsim(&["sweep", "--family", "caterpillar", "--distances", "", "--label-pairs", "2:5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn sweep_from_spec_file_with_threads() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        &dir,
        "spec.json",
        r#"{"family":"random","sizes":[20,40],"degrees":[4],"seeds":[1,2,3],"label_pairs":[[0,1],[3,5]]}"#,
    );
    let a = rvsim(&["sweep", "--spec", &spec, "--threads", "1"]);
    let b = rvsim(&["sweep", "--spec", &spec, "--threads", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(csv_rows(&stdout(&a)).len(), 12);
}

#[test]
fn lowerbound_large_label_space() {
    let o = rvsim(&["lowerbound", "--k", "13", "--labels", "2^64", "--distance", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["guaranteed_horizon"], 16);
    assert!(v["verified_horizon"].as_u64().unwrap() >= 16);
    assert!(v["verified_horizon"].as_u64().unwrap() >= v["horizon"].as_u64().unwrap());
    assert_eq!(v["label_space"], "2^64");
}

#[test]
fn lowerbound_small_instance_and_graph_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bf.txt");
    let o = rvsim(&[
        "lowerbound", "--k", "3", "--labels", "4", "--distance", "2", "--graph-out",
        g.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("24 72\n"));
}

#[test]
fn lowerbound_even_k_is_a_usage_error() {
    let o = rvsim(&["lowerbound", "--k", "4", "--labels", "16", "--distance", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_help_documents_columns() {
    let o = rvsim(&["sweep", "--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("family,variant,nodes,max_degree"));
}
