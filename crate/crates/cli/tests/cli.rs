use std::path::Path;
use std::process::{Command, Output};

use pebbling_core::bounds::BoundsJson;
use pebbling_core::families::petersen;
use pebbling_core::solver::{Move, MoveSequence};
use pebbling_core::verify::petersen_neighbor_trees;
use pebbling_core::{Configuration, Graph, StrategySet};
use serde_json::Value;

fn pebbling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pebbling"))
        .args(args)
        .env_remove("PEBBLING_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = pebbling(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    serde_json::from_str(&ok(&all)).unwrap()
}

fn without_elapsed(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn family_petersen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&["family", "--kind", "petersen"]);
    assert!(text.starts_with("10 15\n"));
    assert_eq!(Graph::parse_edge_list(&text).unwrap(), petersen());

    let file = dir.path().join("p.txt");
    ok(&["family", "--kind", "petersen", "-o", path_str(&file)]);
    assert_eq!(std::fs::read_to_string(&file).unwrap(), text);

    let jfile = dir.path().join("p.json");
    ok(&["family", "--kind", "petersen", "--json", "-o", path_str(&jfile)]);
    let a = json(&["pi", "--graph", path_str(&file), "--root", "0"]);
    let b = json(&["pi", "--graph", path_str(&jfile), "--root", "0"]);
    assert_eq!(without_elapsed(a), without_elapsed(b));
}

#[test]
fn family_sizes() {
    for (args, n, m) in [
        (vec!["--kind", "path", "--n", "4"], 4, 3),
        (vec!["--kind", "hypercube", "--d", "3"], 8, 12),
        (vec!["--kind", "bruhat", "--n", "4"], 24, 36),
        (vec!["--kind", "tree", "--parents", "-,0,0,1"], 4, 3),
    ] {
        let mut all = vec!["family"];
        all.extend(args);
        let g = Graph::parse_edge_list(&ok(&all)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (n, m));
    }
    assert_eq!(pebbling(&["family", "--kind", "cycle"]).status.code(), Some(2));
}

#[test]
fn pi_of_c5_is_five() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c5.txt");
    ok(&["family", "--kind", "cycle", "--n", "5", "-o", path_str(&file)]);
    assert_eq!(ok(&["pi", "--graph", path_str(&file)]), "5 (root 0)\n");
    assert_eq!(ok(&["pi", "--graph", path_str(&file), "--root", "2"]), "5\n");
}

#[test]
fn bound_with_petersen_tree_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("petersen.txt");
    let strategies = dir.path().join("s.json");
    ok(&["family", "--kind", "petersen", "-o", path_str(&graph)]);
    std::fs::write(&strategies, petersen_neighbor_trees(0).to_json()).unwrap();
    let report = json(&["bound", "--graph", path_str(&graph), "--root", "0", "--strategies", path_str(&strategies)]);
    let root = &report["per_root"][0];
    assert_eq!((root["kappa"].as_u64(), root["chi"].as_u64()), (Some(4), Some(36)));
    assert_eq!(root["ratio_bound"].as_u64(), Some(10));
    assert_eq!(report["overall_bound"].as_u64(), Some(10));

    // the file root must match --root
    let out = pebbling(&["bound", "--graph", path_str(&graph), "--root", "1", "--strategies", path_str(&strategies)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generated_strategies_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    for method in ["greedy", "paths", "bfs"] {
        ok(&["strategies", "--family", "petersen", "--root", "3", "--method", method, "-o", path_str(&file)]);
        let text = std::fs::read_to_string(&file).unwrap();
        let set = StrategySet::from_json(&petersen(), &text).unwrap();
        assert_eq!(set.to_json(), text);
        assert!(set.uncovered(&petersen()).is_empty());
        let report = json(&["bound", "--family", "petersen", "--root", "3", "--strategies", path_str(&file)]);
        assert!(report["overall_bound"].as_u64().unwrap() >= 10);
    }
}

#[test]
fn max_unsolvable_config_feeds_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    ok(&["max-unsolvable", "--family", "cycle:6", "--root", "0", "-o", path_str(&cfg)]);
    let text = std::fs::read_to_string(&cfg).unwrap();
    let c = Configuration::parse_sparse(&text, 6).unwrap();
    assert_eq!(c.total(), 7);
    assert_eq!(ok(&["solve", "--family", "cycle:6", "--root", "0", "--config-file", path_str(&cfg)]), "unsolvable\n");

    // a JSON report is accepted as a configuration source too
    let rep = dir.path().join("pi.json");
    ok(&["pi", "--family", "cycle:7", "--root", "0", "--json", "-o", path_str(&rep)]);
    let v = json(&["solve", "--family", "cycle:7", "--root", "0", "--config-file", path_str(&rep)]);
    assert_eq!(v["solvable"], Value::Bool(false));
    assert_eq!(v["witness"], serde_json::json!([]));
}

#[test]
fn solve_witness_replays() {
    let g = petersen();
    let config = "5:1,6:2,7:3,8:2";
    let v = json(&["solve", "--family", "petersen", "--root", "0", "--config", config]);
    assert_eq!(v["solvable"], Value::Bool(true));
    let moves: Vec<(usize, usize)> = serde_json::from_value(v["witness"].clone()).unwrap();
    let seq = MoveSequence(moves.into_iter().map(|(u, w)| Move(u, w)).collect());
    let end = seq.replay(&g, &Configuration::parse_sparse(config, 10).unwrap()).unwrap();
    assert!(end.0[0] >= 1);
    for key in ["solvable", "witness", "explored", "elapsed_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn json_is_stable_and_thread_independent() {
    let args = ["bound", "--family", "cycle:7", "--json"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    assert_eq!(a, ok(&one));

    let pi = |threads: &str| without_elapsed(json(&["pi", "--family", "hypercube:3", "--threads", threads]));
    assert_eq!(pi("1"), pi("4"));

    let env = Command::new(env!("CARGO_BIN_EXE_pebbling"))
        .args(["pi", "--family", "hypercube:3", "--json"])
        .env("PEBBLING_THREADS", "2")
        .output()
        .unwrap();
    assert!(env.status.success());
    let v: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(without_elapsed(v), pi("1"));
}

#[test]
fn bound_report_file_deserializes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("b.json");
    ok(&["bound", "--family", "hypercube:3", "--json", "-o", path_str(&file)]);
    let report: BoundsJson = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(report.per_root.len(), 8);
    assert!(report.overall_bound.unwrap() >= 8);
}

#[test]
fn lp_reports_and_traces() {
    let out = pebbling(&["lp", "--family", "cycle:5", "--root", "0", "--method", "paths", "--max-len", "4", "--trace"]);
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
    let v = json(&["lp", "--family", "cycle:5", "--root", "0", "--method", "paths", "--max-len", "4"]);
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["point"].as_object().unwrap().len(), 4);
}

#[test]
fn tree_pi_matches_partition() {
    let v = json(&["tree-pi", "--family", "tree:-,0,0,1,1,2,2", "--root", "0"]);
    assert_eq!(v["value"].as_u64(), Some(9));
    let mut lengths: Vec<u64> = serde_json::from_value(v["lengths"].clone()).unwrap();
    lengths.sort_unstable();
    assert_eq!(lengths, vec![1, 1, 2, 2]);
    assert_eq!(ok(&["tree-pi", "--family", "tree:-,0,0,0"]).lines().next(), Some("5 (root 1)"));
    assert_eq!(pebbling(&["tree-pi", "--family", "cycle:4"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(pebbling(&["solve", "--family", "path:3"]).status.code(), Some(2));
    assert_eq!(pebbling(&["pi", "--family", "path:3", "--bogus"]).status.code(), Some(2));
    assert_eq!(pebbling(&["nonsense"]).status.code(), Some(2));
    assert_eq!(pebbling(&["pi", "--family", "path:3", "--root", "9"]).status.code(), Some(1));
    assert_eq!(pebbling(&["pi", "--family", "path:3", "--graph", "x"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 2\n0 1\n1 x\n").unwrap();
    let out = pebbling(&["pi", "--graph", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    // unsolvable is an answer, not an error
    assert_eq!(ok(&["solve", "--family", "path:3", "--root", "0", "--config", "2:3"]), "unsolvable\n");
}

#[test]
fn cap_is_reported() {
    let out = pebbling(&["pi", "--family", "path:7", "--root", "0", "--max-configs", "1000"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_fast_passes() {
    let v = json(&["verify", "--level", "fast"]);
    assert_eq!(v["passed"], Value::Bool(true));
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(!ids.contains(&"5") && ids.contains(&"8"));
}
