use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exphier"))
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn graph_text(n: usize, edges: &[(usize, usize)]) -> String {
    let mut s = format!("{n} {}\n", edges.len());
    for (u, v) in edges {
        s += &format!("{u} {v}\n");
    }
    s
}

fn complete(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn lines_json(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn edgeless_graph_gives_singletons() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "5 0\n");
    let o = run(&["decompose", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let clusters = v["decomposition"]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 5);
    assert!(clusters.iter().all(|c| c["members"].as_array().unwrap().len() == 1));
    assert_eq!(v["passed"], true);
}

#[test]
fn k8_passes_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k8.txt", &graph_text(8, &complete(8)));
    let o = run(&["decompose", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!(v["report"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn malformed_line_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.txt", "3 1\nx y z\n");
    let o = run(&["decompose", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn failing_check_exits_one_with_witness() {
    // two triangles joined by an edge; C_1 = 0 leaves no room for the bridge
    let dir = tempfile::tempdir().unwrap();
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
    let g = write(dir.path(), "g.txt", &graph_text(6, &edges));
    let cfg = write(dir.path(), "c.cfg", "c1_mult = 0\nphi = 1/4\nalpha = 1/16\n");
    let o = run(&["--config", cfg.to_str().unwrap(), "decompose", g.to_str().unwrap()]);
    let v = stdout_json(&o);
    assert!(v["decomposition"]["clusters"].as_array().unwrap().len() > 1);
    assert_eq!(o.status.code(), Some(1));
    let failed: Vec<&Value> = v["report"]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "property1");
    assert!(failed[0].get("witness").is_some());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.txt", &graph_text(4, &complete(4)));
    let cfg = write(dir.path(), "c.cfg", "phi = 1/8\nalpha = 1/32 # comment\n");
    let o = run(&["--config", cfg.to_str().unwrap(), "decompose", g.to_str().unwrap()]);
    assert_eq!(stdout_json(&o)["decomposition"]["phi"], "1/8");
    let o = run(&["--config", cfg.to_str().unwrap(), "--phi", "1/16", "decompose", g.to_str().unwrap()]);
    let v = stdout_json(&o);
    assert_eq!(v["decomposition"]["phi"], "1/16");
    assert_eq!(v["decomposition"]["alpha"], "1/32");
    let bad = write(dir.path(), "bad.cfg", "phi = 1/8\nnonsense = 1\n");
    let o = run(&["--config", bad.to_str().unwrap(), "decompose", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = run(&["--phi", "3/7", "decompose", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hierarchy_text_lists_nodes_and_bags() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k5.txt", &graph_text(5, &complete(5)));
    let o = run(&["hierarchy", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("node 0 level 0 parent 5 cap 4\n"));
    assert!(text.contains("node 5 level 1 parent - cap 0\n"));
    assert!(text.contains("bag 0: 0 1 2 3 4\n"));
    let o = run(&["hierarchy", "--format", "json", g.to_str().unwrap()]);
    let v = stdout_json(&o);
    assert_eq!(v["depth"], 1);
    assert_eq!(v["width"], 4);
}

/// Union-find over the current edges, rebuilt after every deletion.
fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut p, a), find(&mut p, b));
        p[ra] = rb;
    }
    (0..n).map(|x| find(&mut p, x)).collect()
}

#[test]
fn connectivity_answers_match_union_find() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 30;
    let mut edges: Vec<(usize, usize)> = (0..35).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).filter(|(a, b)| a != b).collect();
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", &graph_text(n, &edges));
    let mut stream = String::new();
    let mut expected = Vec::new();
    for _ in 0..300 {
        if rng.gen_bool(0.3) && !edges.is_empty() {
            let (a, b) = edges.swap_remove(rng.gen_range(0..edges.len()));
            stream += &format!("D {a} {b}\n");
        } else if rng.gen_bool(0.3) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a, b));
                stream += &format!("I {a} {b}\n");
            }
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let comp = components(n, &edges);
        expected.push(comp[a] == comp[b]);
        stream += &format!("QC {a} {b}\n");
    }
    let s = write(dir.path(), "s.txt", &stream);
    let o = run(&["dynamic", g.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = lines_json(&o);
    assert_eq!(out.len(), expected.len() + 1);
    for (v, want) in out.iter().zip(&expected) {
        assert_eq!(v["op"], "QC");
        assert_eq!(v["answer"], *want);
        assert!(v["level_stats"].is_array());
    }
    assert_eq!(out.last().unwrap()["summary"]["queries"], 300);
}

#[test]
fn audited_flow_query_reports_the_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k6.txt", &graph_text(6, &complete(6)));
    let s = write(dir.path(), "s.txt", "QF 0 5\nD 0 5\nQF 0 5\nQF 3 3\n");
    let o = run(&["dynamic", "--audit", g.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = lines_json(&o);
    assert_eq!(out[0]["answer"]["exact"], 5);
    assert!(out[0]["answer"]["estimate"].as_u64().unwrap() >= 5);
    assert_eq!(out[1]["answer"]["exact"], 4);
    assert_eq!(out[2]["answer"]["estimate"], "inf");
    assert_eq!(out[3]["passed"], true);
    let o = run(&["dynamic", g.to_str().unwrap(), s.to_str().unwrap()]);
    assert!(lines_json(&o)[0]["answer"].get("exact").is_none());
}

#[test]
fn empty_stream_has_zero_updates() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", &graph_text(4, &complete(4)));
    let s = write(dir.path(), "s.txt", "# nothing\n\n");
    let o = run(&["dynamic", g.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = lines_json(&o);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0]["summary"]["updates"], 0);
    assert_eq!(out[0]["summary"]["avg_recourse"], 0.0);
}

#[test]
fn invalid_delete_is_a_stream_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", &graph_text(4, &[(0, 1)]));
    let s = write(dir.path(), "s.txt", "QC 0 1\nD 0 1\nD 0 1\n");
    let o = run(&["dynamic", g.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn unknown_battery_is_a_usage_error() {
    let o = run(&["verify", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn batteries_are_deterministic() {
    let a = run(&["--seed", "5", "verify", "treewidth"]);
    let b = run(&["--seed", "5", "verify", "treewidth"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--seed", "5", "verify", "sparsifier"]);
    let d = run(&["--seed", "5", "verify", "sparsifier"]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(c.stdout, d.stdout);
    let v = stdout_json(&c);
    assert!(v["batteries"][0]["metrics"]["max_ratio"].as_f64().unwrap() <= 64.0);
}

#[test]
fn prune_battery_passes() {
    let o = run(&["verify", "prune"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn bench_reports_throughput() {
    let o = run(&["bench", "--n", "200", "--m", "150", "--updates", "300"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["updates"], 300);
    assert!(v["updates_per_second"].as_f64().unwrap() > 0.0);
}
