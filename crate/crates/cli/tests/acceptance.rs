//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use exphier::battery::{self, BatteryConfig, BatteryReport, RECOURSE_CEILING};
use exphier::oracle::VerificationReport;

struct Outcome {
    passed: bool,
    detail: String,
}

fn failures(r: &VerificationReport) -> String {
    let names: Vec<String> = r.failures().map(|c| format!("{} ({})", c.name, c.measured)).collect();
    if names.is_empty() {
        String::new()
    } else {
        format!("; failed: {}", names.join(", "))
    }
}

fn from_battery(b: &BatteryReport, limit: Option<Duration>, took: Duration) -> Outcome {
    let in_time = limit.is_none_or(|l| took < l);
    let mut detail = format!("{} instances, {:.1}s", b.instances, took.as_secs_f64());
    if let Some(l) = limit {
        let _ = write!(detail, " (limit {}s)", l.as_secs());
    }
    detail += &failures(&b.report);
    Outcome { passed: b.passed() && in_time, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let x = f();
    (x, start.elapsed())
}

fn metric(b: &BatteryReport, key: &str) -> String {
    b.metrics.get(key).map_or_else(|| "-".into(), Value::to_string)
}

fn criteria_5_and_6(cfg: &BatteryConfig) -> (Outcome, Outcome) {
    let ((report, run), took) = timed(|| battery::hierarchy_run(cfg, 10_000, 100));
    let accounting = |name: &str| name == "total_boundary" || name == "recourse_ceiling";
    let mut consistency = VerificationReport::default();
    let mut recourse = VerificationReport::default();
    for c in report.checks {
        if accounting(&c.name) { recourse.checks.push(c) } else { consistency.checks.push(c) }
    }
    let in_time = took < Duration::from_secs(600);
    let five = Outcome {
        passed: consistency.passed() && in_time && run.updates == 10_000 && run.queries == 10_000,
        detail: format!(
            "{} updates, {} queries, {:.1}s (limit 600s){}",
            run.updates,
            run.queries,
            took.as_secs_f64(),
            failures(&consistency)
        ),
    };
    let six = Outcome {
        passed: recourse.passed() && recourse.checks.len() == 2,
        detail: format!(
            "avg recourse {:.3} (ceiling {RECOURSE_CEILING}), max {}, contracted edges {} (bound {:.0}){}",
            run.avg_recourse,
            run.max_recourse,
            run.contracted_edges,
            run.contracted_bound,
            failures(&recourse)
        ),
    };
    (five, six)
}

fn criterion_10() -> Outcome {
    let (n, m, updates) = (10_000usize, 4_000usize, 100_000usize);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pair = |rng: &mut ChaCha8Rng| {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        (u, v)
    };
    let mut edges: Vec<(usize, usize)> = (0..m).map(|_| pair(&mut rng)).collect();
    let mut graph = format!("{n} {m}\n");
    for (u, v) in &edges {
        let _ = writeln!(graph, "{u} {v}");
    }
    let mut stream = String::with_capacity(updates * 14);
    for i in 0..updates {
        if !edges.is_empty() && rng.gen_bool(0.5) {
            let (u, v) = edges.swap_remove(rng.gen_range(0..edges.len()));
            let _ = writeln!(stream, "D {u} {v}");
        } else {
            let (u, v) = pair(&mut rng);
            edges.push((u, v));
            let _ = writeln!(stream, "I {u} {v}");
        }
        if i % 1000 == 999 {
            let (u, v) = pair(&mut rng);
            let _ = writeln!(stream, "QC {u} {v}");
        }
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let g = dir.path().join("graph.txt");
    let s = dir.path().join("stream.txt");
    let c = dir.path().join("smoke.cfg");
    std::fs::write(&g, graph).expect("write graph");
    std::fs::write(&s, stream).expect("write stream");
    std::fs::write(&c, "phi = 1/64\nalpha = 1/256\nbudget_scale = 100000\n").expect("write config");
    let (out, took) = timed(|| {
        Command::new(env!("CARGO_BIN_EXE_exphier"))
            .arg("--config")
            .arg(&c)
            .arg("dynamic")
            .arg(&g)
            .arg(&s)
            .output()
            .expect("binary runs")
    });
    let last: Option<Value> = String::from_utf8_lossy(&out.stdout).lines().last().and_then(|l| serde_json::from_str(l).ok());
    let processed = last.as_ref().and_then(|v| v["summary"]["updates"].as_u64()).unwrap_or(0);
    let recourse = last.as_ref().and_then(|v| v["summary"]["avg_recourse"].as_f64()).unwrap_or(f64::NAN);
    let in_time = took < Duration::from_secs(300);
    Outcome {
        passed: out.status.success() && processed == updates as u64 && in_time,
        detail: format!(
            "n={n}, {processed} updates, {:.1}s (limit 300s), exit {:?}, avg recourse {recourse:.3}",
            took.as_secs_f64(),
            out.status.code()
        ),
    }
}

fn main() {
    let cfg = BatteryConfig::default();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |k: u32, o: Outcome| {
        println!("criterion {k}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((k, o));
    };

    let (b, t) = timed(|| battery::incflow_battery(&cfg));
    report(1, from_battery(&b, Some(Duration::from_secs(60)), t));

    let (b, t) = timed(|| battery::trimming_battery(&cfg));
    let mut o = from_battery(&b, None, t);
    o.detail += &format!(", pruned instances {}", metric(&b, "instances_with_pruning"));
    report(2, o);

    let (b, t) = timed(|| battery::decomposition_battery(&cfg));
    let mut o = from_battery(&b, Some(Duration::from_secs(300)), t);
    o.detail += &format!(", max rounds {}", metric(&b, "max_rounds"));
    report(3, o);

    let (b, t) = timed(|| battery::pruning_battery(&cfg));
    report(4, from_battery(&b, None, t));

    let (five, six) = criteria_5_and_6(&cfg);
    report(5, five);
    report(6, six);

    let (b, t) = timed(|| battery::sparsifier_battery(&cfg));
    let mut o = from_battery(&b, None, t);
    o.detail += &format!(", max ratio {}", metric(&b, "max_ratio"));
    report(7, o);

    let (b, t) = timed(|| battery::tree_query_battery(&cfg));
    report(8, from_battery(&b, None, t));

    let (b, t) = timed(|| battery::treewidth_battery(&cfg));
    report(9, from_battery(&b, None, t));

    report(10, criterion_10());

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.passed).map(|(k, _)| *k).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
