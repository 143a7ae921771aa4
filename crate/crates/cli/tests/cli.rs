//! Subcommand behavior: outputs, exit codes, and the config echo.

use std::path::Path;
use std::process::{Command, Output};

fn oritile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oritile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn gen_tournament(dir: &Path, n: usize, seed: u64) -> String {
    let path = dir.join(format!("t{n}_{seed}.edges"));
    let out = oritile(&[
        "gen",
        "tournament",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

#[test]
fn gen_writes_the_expected_edge_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t16.edges");
    let out = oritile(&["gen", "tournament", "16", "--seed", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let edges = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(edges, 120); // C(16, 2)
    assert!(text.starts_with("# config:"), "config line embedded");
    assert!(String::from_utf8_lossy(&out.stdout).contains("e=120"));

    let empty = dir.path().join("o0.edges");
    let out = oritile(&["gen", "oriented", "100", "0.0", "--seed", "2", "--out", empty.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&empty).unwrap();
    assert!(text.contains("\n100 0\n") || text.ends_with("100 0\n"));
}

#[test]
fn gen_rejects_bad_probability() {
    let out = oritile(&["gen", "oriented", "10", "1.5", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degree_reports_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen_tournament(dir.path(), 9, 3);
    let out = oritile(&["degree", &graph]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["n"], 9);
    assert_eq!(v["edges"], 36);
    assert_eq!(v["total_degree"], 8); // tournaments are complete
    assert_eq!(v["config"]["command"], "degree");
}

#[test]
fn partition_produces_blocks_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen_tournament(dir.path(), 512, 1);

    let out = oritile(&["partition", &graph, "--ell", "64", "--seed", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["partition"]["blocks"].as_array().unwrap().len(), 8);
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["annotations"]["best_effort_used"], false);

    // 60 does not divide 512
    let out = oritile(&["partition", &graph, "--ell", "60"]);
    assert_eq!(out.status.code(), Some(3));

    // zero attempts: strict fails with its own code, best-effort proceeds
    // with the annotation set
    let out = oritile(&["partition", &graph, "--ell", "64", "--max-attempts", "0"]);
    assert_eq!(out.status.code(), Some(4));
    let out = oritile(&[
        "partition", &graph, "--ell", "64", "--max-attempts", "0", "--best-effort",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["annotations"]["best_effort_used"], true);
}

#[test]
fn hamilton_exit_codes_reflect_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    // transitive tournament: no directed hamilton cycle
    let path = dir.path().join("trans.edges");
    std::fs::write(&path, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let out = oritile(&["hamilton", path.to_str().unwrap(), "--pattern", "++++"]);
    assert_eq!(out.status.code(), Some(5));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "not_found");

    // reversing one edge makes it strongly connected
    let cyc = dir.path().join("cyc.edges");
    std::fs::write(&cyc, "4 6\n0 1\n0 2\n3 0\n1 2\n1 3\n2 3\n").unwrap();
    let out = oritile(&["hamilton", cyc.to_str().unwrap(), "--pattern", "++++"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "found");
    assert_eq!(v["embedding"]["vertices"].as_array().unwrap().len(), 4);

    // dp capped out and a zero budget: inconclusive
    let big = gen_tournament(dir.path(), 30, 2);
    let pattern = "+".repeat(30);
    let out = oritile(&["hamilton", &big, "--pattern", &pattern, "--budget", "0"]);
    assert_eq!(out.status.code(), Some(6));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "budget_exhausted");
    assert_eq!(v["method"], "backtrack");
}

#[test]
fn factor_single_part_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    // m = 1: reduces to one hamilton search
    let path = dir.path().join("c8.edges");
    let mut text = String::from("8 16\n");
    for i in 0..8 {
        text.push_str(&format!("{} {}\n{} {}\n", i, (i + 1) % 8, i, (i + 2) % 8));
    }
    std::fs::write(&path, text).unwrap();
    let out = oritile(&["factor", path.to_str().unwrap(), "--ell", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["parts"], 1);
    assert_eq!(v["guarantee_flags"][0], false);
    assert_eq!(v["verdict"]["tiling_ok"], true);

    // pattern length mismatch is a usage error
    let out = oritile(&["factor", path.to_str().unwrap(), "--ell", "8", "--patterns", "+++"]);
    assert_eq!(out.status.code(), Some(2));

    // ell must divide n
    let out = oritile(&["factor", path.to_str().unwrap(), "--ell", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn factor_certificate_carries_distinct_orientation_classes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen_tournament(dir.path(), 24, 0);
    let cert_path = dir.path().join("cert.json");
    let out = oritile(&[
        "factor", &graph, "--ell", "8",
        "--patterns", "++++++++,+++-++-+,++++++--",
        "--seed", "5", "--threads", "1", "--out", cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    let patterns: Vec<String> = v["patterns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_str().unwrap().to_string())
        .collect();
    assert_eq!(patterns.len(), 3);
    assert_eq!(v["embeddings"].as_array().unwrap().len(), 3);
    assert_eq!(v["graph_hash"].as_str().unwrap().len(), 16);
    assert!(v["threshold_report"]["ell0_epsilon_term"].is_number());
}

#[test]
fn experiment_validates_its_grid() {
    let out = oritile(&[
        "experiment", "tail", "--N", "100", "--n", "50", "--m", "50", "--t", "10", "--samples", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = oritile(&[
        "experiment", "tail", "--N", "100", "--n", "100", "--m", "50", "--t", "10",
        "--samples", "10",
    ]);
    assert_eq!(out.status.code(), Some(2)); // n = N is out of range

    let out = oritile(&[
        "experiment", "tail", "--N", "60", "--n", "30", "--m", "15,30", "--t", "5.477,9.654",
        "--samples", "20000", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn experiment_split_success_reports_rate() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("split.json");
    let out = oritile(&[
        "experiment", "split-success", "--n", "128", "--trials", "40", "--seed", "9",
        "--out", json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(v["result"]["success_rate"].as_f64().unwrap() >= 0.5);
    // CSV twin exists with a header and one row
    let csv = std::fs::read_to_string(dir.path().join("split.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("n,trials,"));

    let out = oritile(&["experiment", "split-success", "--n", "7", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_embed_their_config() {
    let dir = tempfile::tempdir().unwrap();
    let graph = gen_tournament(dir.path(), 16, 1);
    for args in [
        vec!["degree", graph.as_str()],
        vec!["partition", graph.as_str(), "--ell", "4", "--seed", "7"],
        vec!["hamilton", graph.as_str(), "--pattern", "++++++++++++++++"],
    ] {
        let out = oritile(&args);
        let v = stdout_json(&out);
        assert!(v["config"].is_object(), "{args:?} lacks config");
        assert!(v["run_meta"].is_string(), "{args:?} lacks run_meta");
    }
}
