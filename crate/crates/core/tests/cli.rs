use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_streamdecomp");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("STREAMDECOMP_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generated(dir: &Path, kind: &str, n: usize) -> PathBuf {
    let path = dir.join(format!("{kind}.graph"));
    ok(&["generate", kind, "-n", &n.to_string(), "--seed", "3", "-o", p(&path)]);
    path
}

fn lines(path: &Path) -> Vec<u32> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

#[test]
fn partition_writes_n_lines_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "rgg2d", 2000);
    let part = dir.path().join("g.part");
    let json = ok(&["partition", "-i", p(&g), "--algorithm", "fennel", "--k", "32", "-o", p(&part)]);
    let v: Value = serde_json::from_str(&json).unwrap();
    let blocks = lines(&part);
    assert_eq!(blocks.len(), 2000);
    assert!(blocks.iter().all(|&b| b < 32));
    for key in ["edge_cut", "imbalance", "runtime_ms", "algorithm", "k", "epsilon", "seed", "run_spec", "alpha", "gamma"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["algorithm"], "fennel");
    assert_eq!(v["k"], 32);
    assert_eq!(v["epsilon"], 0.03);
    assert_eq!(v["run_spec"]["command"], "partition");
    assert!(v["max_block_weight"].as_u64().unwrap() <= v["l_max"].as_u64().unwrap());
}

#[test]
fn metrics_reproduce_the_generating_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "tri2d", 900);
    let part = dir.path().join("g.part");
    let json = dir.path().join("run.json");
    ok(&["heistream", "-i", p(&g), "-k", "8", "--delta", "100", "-o", p(&part), "--metrics-json", p(&json)]);
    let run: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let again: Value = serde_json::from_str(&ok(&["metrics", "-i", p(&g), "-p", p(&part), "-k", "8"])).unwrap();
    for key in ["edge_cut", "imbalance", "l_max", "max_block_weight", "k", "epsilon"] {
        assert_eq!(run[key], again[key], "{key}");
    }
}

#[test]
fn run_spec_reproduces_the_partition() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "gnm", 500);
    let first = dir.path().join("a.part");
    let second = dir.path().join("b.part");
    let json = ok(&["heistream", "-i", p(&g), "-k", "4", "--delta", "64", "--seed", "11", "-o", p(&first)]);
    let spec: Value = serde_json::from_str::<Value>(&json).unwrap()["run_spec"].clone();
    let mut cmd: streamdecomp::cli::Command = serde_json::from_value(spec).unwrap();
    match &mut cmd {
        streamdecomp::cli::Command::Heistream(a) => {
            assert_eq!(a.common.seed, 11);
            a.common.output = Some(second.clone());
        }
        other => panic!("unexpected {other:?}"),
    }
    streamdecomp::cli::run(&cmd).unwrap();
    assert_eq!(lines(&first), lines(&second));
}

#[test]
fn bench_emits_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "rgg2d", 1000);
    let csv = dir.path().join("bench.csv");
    ok(&[
        "bench", "-i", p(&g), "--algorithms", "hashing,ldg,fennel,heistream", "--k", "2,8,32", "--repeats", "3",
        "-o", p(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 37);
    assert!(rows[0].starts_with("edge_cut,"));

    let summary = ok(&["summarize", "-i", p(&csv)]);
    assert_eq!(summary.lines().count(), 13);
    assert!(summary.lines().skip(1).all(|l| l.contains(",3,")));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "gnm", 300);
    let out = Command::new(BIN)
        .args(["partition", "-i", p(&g), "-k", "4", "--algorithm", "hashing", "-o", p(&dir.path().join("x"))])
        .env("STREAMDECOMP_SEED", "77")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 77);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["partition", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["partition", "-i", "x.graph"]).status.code(), Some(1));
    let missing = dir.path().join("missing.graph");
    assert_eq!(run(&["partition", "-i", p(&missing), "-k", "4"]).status.code(), Some(2));
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "3 2\n2\n1 3\n").unwrap();
    assert_eq!(run(&["partition", "-i", p(&bad), "-k", "2"]).status.code(), Some(2));
    let g = generated(dir.path(), "gnm", 50);
    assert_eq!(run(&["partition", "-i", p(&g), "-k", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn transpose_then_freight() {
    let dir = tempfile::tempdir().unwrap();
    let hgr = dir.path().join("h.hgr");
    let nm = dir.path().join("h.nm");
    ok(&["generate", "stencil2d", "-n", "1600", "-o", p(&hgr)]);
    ok(&["transpose", "-i", p(&hgr), "-o", p(&nm)]);
    let a = dir.path().join("a.part");
    let b = dir.path().join("b.part");
    let node_major: Value = serde_json::from_str(&ok(&["freight", "-i", p(&nm), "-k", "16", "-o", p(&a)])).unwrap();
    let net_major: Value =
        serde_json::from_str(&ok(&["hpartition", "-i", p(&hgr), "--net-major", "-k", "16", "-o", p(&b)])).unwrap();
    assert_eq!(lines(&a).len(), 1600);
    assert_eq!(node_major["algorithm"], "freight-con");
    assert_eq!(node_major["connectivity"], net_major["connectivity"]);
    assert!(node_major["cut_net"].as_u64().unwrap() > 0);
}

#[test]
fn map_reports_comm_cost() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "rgg2d", 3000);
    let part = dir.path().join("m.part");
    let v: Value = serde_json::from_str(&ok(&[
        "map", "-i", p(&g), "--hierarchy", "4:4:2", "--distances", "1:10:100", "--time-core", "-o", p(&part),
    ]))
    .unwrap();
    assert_eq!(v["k"], 32);
    assert_eq!(v["algorithm"], "oms");
    assert_eq!(v["runtime_ms"], v["core_ms"]);
    let again: Value = serde_json::from_str(&ok(&[
        "metrics", "-i", p(&g), "-p", p(&part), "-k", "32", "--hierarchy", "4:4:2", "--distances", "1:10:100",
    ]))
    .unwrap();
    assert!(v["comm_cost"].as_u64().unwrap() > 0);
    assert_eq!(v["comm_cost"], again["comm_cost"]);
}

#[test]
fn csv_flag_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    let g = generated(dir.path(), "gnm", 200);
    let csv = dir.path().join("runs.csv");
    for alg in ["ldg", "fennel"] {
        ok(&["partition", "-i", p(&g), "-k", "4", "--algorithm", alg, "--csv", p(&csv), "-o", p(&dir.path().join(alg))]);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
}
