use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use exphier::apps::{build_cap_tree, quality_report, treewidth_bags};
use exphier::battery::run_battery;
use exphier::decomp::{self, build_static_hierarchy, Hierarchy};
use exphier::dynhier::DynHierarchy;
use exphier::oracle::{verify_tree_decomposition, VerificationReport};
use exphier::stream::{parse_stream, run_stream, StreamOptions};
use exphier::{DynGraph, EdgeOp, VertexId};

use crate::config::RunConfig;
use crate::{CliError, Outcome};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<DynGraph, CliError> {
    DynGraph::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn outcome(passed: bool) -> Outcome {
    if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailure
    }
}

fn print_json(v: &Value) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Per-level decomposition checks and the tree-decomposition axioms.
fn check_hierarchy(h: &Hierarchy, limit: usize) -> Result<VerificationReport, CliError> {
    let mut r = VerificationReport::default();
    for (i, lvl) in h.levels.iter().enumerate() {
        r.absorb(&format!("level{i}."), lvl.decomposition.verify(&lvl.graph, limit));
    }
    let bags = treewidth_bags(h)?;
    r.absorb("bags.", verify_tree_decomposition(h.graph(0), &bags.parent, &bags.bags));
    Ok(r)
}

pub fn decompose(cfg: &RunConfig, path: &Path) -> Result<Outcome, CliError> {
    let g = load_graph(path)?;
    let all: Vec<VertexId> = g.vertices().collect();
    let d = decomp::decompose(&g, &all, &cfg.decomp_params(), cfg.seed)?;
    let report = d.verify(&g, cfg.exhaustive_limit);
    let passed = report.passed();
    print_json(&json!({ "decomposition": d, "report": report, "passed": passed }))?;
    Ok(outcome(passed))
}

pub fn hierarchy(cfg: &RunConfig, path: &Path, format: &str) -> Result<Outcome, CliError> {
    if format != "text" && format != "json" {
        return Err(CliError::Usage(format!("unknown format {format:?}; expected text or json")));
    }
    let g = load_graph(path)?;
    let h = build_static_hierarchy(&g, &cfg.decomp_params(), cfg.seed, cfg.max_depth)?;
    let tree = build_cap_tree(&h);
    let bags = treewidth_bags(&h)?;
    let report = check_hierarchy(&h, cfg.exhaustive_limit)?;
    let passed = report.passed();
    if format == "json" {
        print_json(&json!({
            "depth": h.depth(),
            "slack": h.slack(),
            "quality": quality_report(&h, 1.0, None),
            "width": bags.width(),
            "tree": tree.to_text(),
            "bags": bags.to_text(),
            "report": report,
            "passed": passed,
        }))?;
    } else {
        let mut out = BufWriter::new(std::io::stdout().lock());
        out.write_all(tree.to_text().as_bytes())?;
        out.write_all(bags.to_text().as_bytes())?;
        if !passed {
            let failures: Vec<_> = report.failures().collect();
            writeln!(out, "{}", json!({ "passed": false, "failures": failures }))?;
        }
        out.flush()?;
    }
    Ok(outcome(passed))
}

pub fn dynamic(cfg: &RunConfig, graph: &Path, stream: &Path) -> Result<Outcome, CliError> {
    let g = load_graph(graph)?;
    let ops = parse_stream(&read(stream)?)?;
    let mut h = DynHierarchy::new(g, cfg.dyn_params())?;
    let mut out = BufWriter::new(std::io::stdout().lock());
    let mut write_err = None;
    let summary = run_stream(&mut h, &ops, &StreamOptions { audit: cfg.audit }, |v| {
        if write_err.is_none() {
            if let Err(e) = writeln!(out, "{v}") {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    let mut passed = summary.audit_failures == 0;
    let mut result = json!({ "summary": summary });
    if cfg.audit {
        let report = h.check(cfg.exhaustive_limit);
        passed &= report.passed();
        result["report"] = json!(report);
    }
    result["passed"] = json!(passed);
    writeln!(out, "{result}")?;
    out.flush()?;
    Ok(outcome(passed))
}

pub fn verify(cfg: &RunConfig, battery: &str, graph: Option<&Path>) -> Result<Outcome, CliError> {
    let reports = run_battery(battery, &cfg.battery_config()).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut passed = reports.iter().all(|r| r.passed());
    let mut result = json!({ "battery": battery, "seed": cfg.seed, "batteries": reports });
    if let Some(path) = graph {
        let g = load_graph(path)?;
        let all: Vec<VertexId> = g.vertices().collect();
        let mut report = VerificationReport::default();
        let d = decomp::decompose(&g, &all, &cfg.decomp_params(), cfg.seed)?;
        report.absorb("decomposition.", d.verify(&g, cfg.exhaustive_limit));
        let h = build_static_hierarchy(&g, &cfg.decomp_params(), cfg.seed, cfg.max_depth)?;
        report.absorb("hierarchy.", check_hierarchy(&h, cfg.exhaustive_limit)?);
        passed &= report.passed();
        result["graph"] = json!(report);
    }
    result["passed"] = json!(passed);
    print_json(&result)?;
    Ok(outcome(passed))
}

pub fn bench(cfg: &RunConfig, n: usize, m: usize, updates: usize) -> Result<Outcome, CliError> {
    if n < 2 {
        return Err(CliError::Usage("bench needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pair = |rng: &mut ChaCha8Rng| {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        (u, v)
    };
    let mut g = DynGraph::with_vertices(n);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (u, v) = pair(&mut rng);
        g.insert_edge(u, v)?;
        edges.push((u, v));
    }
    let start = Instant::now();
    let mut h = DynHierarchy::new(g, cfg.dyn_params())?;
    let build = start.elapsed().as_secs_f64();
    let start = Instant::now();
    for _ in 0..updates {
        if !edges.is_empty() && rng.gen_bool(0.5) {
            let (u, v) = edges.swap_remove(rng.gen_range(0..edges.len()));
            h.apply(EdgeOp::Delete, u, v)?;
        } else {
            let (u, v) = pair(&mut rng);
            h.apply(EdgeOp::Insert, u, v)?;
            edges.push((u, v));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let stats = h.stats();
    print_json(&json!({
        "n": n,
        "m": m,
        "updates": updates,
        "build_seconds": build,
        "update_seconds": secs,
        "updates_per_second": updates as f64 / secs.max(1e-9),
        "avg_recourse": stats.recourse_total as f64 / updates.max(1) as f64,
        "stats": stats,
        "levels": h.level_stats(),
    }))?;
    Ok(Outcome::Pass)
}
