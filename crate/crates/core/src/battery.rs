//! Seeded verification batteries over generated corpora.
//!
//! Each battery draws its instances from `mix(seed, index)`, checks them in
//! parallel and folds the per-instance results in index order, so a report
//! depends only on the configuration.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::apps::{self, CapTree, TreeNode, INFINITE};
use crate::decomp::{self, build_static_hierarchy, decompose, mix, DecompParams};
use crate::dynhier::{DynHierarchy, DynParams};
use crate::error::{Error, Result};
use crate::graph::{DynGraph, EdgeOp, VertexId, ViewGraph};
use crate::incflow::IncFlowState;
use crate::oracle::{self, VerificationReport};
use crate::prune::PruningState;
use crate::rational::{ceil_u64, fmt_rational, ratio, to_f64, Rational};

/// Average cascaded delta size per update observed on the hierarchy corpus
/// with default parameters, times a safety margin.
pub const RECOURSE_CEILING: f64 = 40.0;

pub const BATTERIES: [&str; 5] = ["decomp", "prune", "sparsifier", "treewidth", "all"];

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Largest cluster checked by enumeration.
    pub exhaustive_limit: usize,
    /// Parameters of the dynamic hierarchy corpus.
    pub dynamic: DynParams,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { seed: 0, exhaustive_limit: 16, dynamic: DynParams::default() }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BatteryReport {
    pub name: String,
    pub instances: usize,
    pub report: VerificationReport,
    pub metrics: BTreeMap<String, Value>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Per-check violation counts with the first witness.
#[derive(Clone, Debug, Default)]
struct Tally {
    entries: BTreeMap<String, Entry>,
}

#[derive(Clone, Debug, Default)]
struct Entry {
    total: u64,
    violations: u64,
    threshold: String,
    witness: Option<Value>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, threshold: &str, witness: impl FnOnce() -> Value) {
        let e = self.entries.entry(name.to_string()).or_default();
        e.total += 1;
        if e.threshold.is_empty() {
            e.threshold = threshold.to_string();
        }
        if !ok {
            e.violations += 1;
            if e.witness.is_none() {
                e.witness = Some(witness());
            }
        }
    }

    fn merge(&mut self, other: Tally, instance: usize) {
        for (k, o) in other.entries {
            let e = self.entries.entry(k).or_default();
            e.total += o.total;
            e.violations += o.violations;
            if e.threshold.is_empty() {
                e.threshold = o.threshold;
            }
            if e.witness.is_none() {
                e.witness = o.witness.map(|w| json!({ "instance": instance, "detail": w }));
            }
        }
    }

    fn into_report(self) -> VerificationReport {
        let mut r = VerificationReport::default();
        for (name, e) in self.entries {
            r.push(name, e.violations == 0, format!("{} violations / {}", e.violations, e.total), e.threshold, e.witness);
        }
        r
    }
}

fn rng_for(seed: u64, salt: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(seed, salt), i as u64))
}

/// Runs `f` on instances `0..count` in parallel and folds the results in order.
fn run_corpus<T: Send>(count: usize, f: impl Fn(usize) -> (Tally, T) + Sync) -> (Tally, Vec<T>) {
    let parts: Vec<(Tally, T)> = (0..count).into_par_iter().map(&f).collect();
    let mut tally = Tally::default();
    let mut extra = Vec::with_capacity(count);
    for (i, (t, x)) in parts.into_iter().enumerate() {
        tally.merge(t, i);
        extra.push(x);
    }
    (tally, extra)
}

/// `m` random non-loop edges on `n ≥ 2` vertices.
fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DynGraph {
    let mut g = DynGraph::with_vertices(n);
    if n < 2 {
        return g;
    }
    for _ in 0..m {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        g.insert_edge(u, v).expect("vertices exist");
    }
    g
}

/// Simple graph with maximum degree 4.
fn bounded_degree_graph(rng: &mut ChaCha8Rng, n: usize, attempts: usize) -> DynGraph {
    let mut g = DynGraph::with_vertices(n);
    for _ in 0..attempts {
        if n < 2 {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && g.degree(u) < 4 && g.degree(v) < 4 && g.multiplicity(u, v) == 0 {
            g.insert_edge(u, v).expect("vertices exist");
        }
    }
    g
}

fn all_vertices(g: &DynGraph) -> Vec<VertexId> {
    g.vertices().collect()
}

fn edge_list(g: &DynGraph) -> Vec<(usize, usize)> {
    g.sorted_edges().iter().map(|e| (e.u, e.v)).collect()
}

/// Incremental flow on random graphs: volume and boundary of `P` against
/// the injected mass, residual feasibility by exact max-flow, monotonicity.
pub fn incflow_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 200;
    let (tally, steps) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 1, i);
        let mut t = Tally::default();
        let n = rng.gen_range(2..=40);
        let m = rng.gen_range(n - 1..=3 * n);
        let g = random_multigraph(&mut rng, n, m);
        let view = g.weighted_view(&all_vertices(&g), ratio(0, 1)).expect("view").materialize();
        let capacity = rng.gen_range(1..=8i64);
        let scale = rng.gen_range(1..=4i64);
        let mut st = IncFlowState::new(view.clone(), capacity, scale).expect("positive capacity");
        let budget = scale * view.volume() as i64 / 3;
        let mut total = 0i64;
        let mut before = vec![false; view.n()];
        let mut steps = 0u64;
        loop {
            let v = rng.gen_range(0..view.n());
            let amount = rng.gen_range(1..=(2 * capacity * view.degree(v).max(1) as i64));
            if total + amount > budget {
                break;
            }
            total += amount;
            steps += 1;
            st.inject_source(v, amount).expect("valid injection");
            let p = st.pruned_mask().to_vec();
            let monotone = before.iter().zip(&p).all(|(&b, &a)| !b || a);
            t.record("monotone", monotone, "P_before ⊆ P_after", || json!({ "step": steps }));
            let vol = view.volume_of(&p) as i64;
            t.record("volume", vol * scale <= 2 * total, "vol(P) ≤ 2ΣΔ", || {
                json!({ "step": steps, "vol": vol, "sum_delta": format!("{total}/{scale}") })
            });
            let cut = view.cut(&p) as i64;
            t.record("boundary", cut * capacity <= 2 * total, "|E(P, V∖P)| ≤ 2ΣΔ/c", || {
                json!({ "step": steps, "cut": cut, "sum_delta": total, "c": capacity })
            });
            let (feasible, _) = st.certify_residual_feasible();
            t.record("residual_feasible", feasible, "exact max-flow routes Δ'", || json!({ "step": steps }));
            before = p;
        }
        (t, (steps, st.pruned().len()))
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("injections".into(), json!(steps.iter().map(|s| s.0).sum::<u64>()));
    metrics.insert("instances_with_pruning".into(), json!(steps.iter().filter(|s| s.1 > 0).count()));
    BatteryReport { name: "incflow".into(), instances: count, report: tally.into_report(), metrics }
}

/// A near-expander `A` (random dense part plus a pendant tail) joined to a
/// small `Ā` by a few edges, as left behind by an unbalanced sparse cut.
fn trimming_instance(rng: &mut ChaCha8Rng) -> (ViewGraph, Vec<bool>, Rational) {
    loop {
        let core = rng.gen_range(8..=24);
        let tail = rng.gen_range(0..=4);
        let outside = rng.gen_range(1..=6);
        let n = core + tail + outside;
        let mut g = DynGraph::with_vertices(n);
        for v in 0..core {
            g.insert_edge(v, (v + 1) % core).expect("vertices exist");
        }
        for _ in 0..rng.gen_range(2 * core..=4 * core) {
            let (u, v) = (rng.gen_range(0..core), rng.gen_range(0..core));
            if u != v {
                g.insert_edge(u, v).expect("vertices exist");
            }
        }
        let mut prev = rng.gen_range(0..core);
        for v in core..core + tail {
            g.insert_edge(prev, v).expect("vertices exist");
            prev = v;
        }
        let a_size = core + tail;
        for v in a_size + 1..n {
            g.insert_edge(v - 1, v).expect("vertices exist");
        }
        let boundary = rng.gen_range(1..=3);
        for k in 0..boundary {
            let inside = if k == 0 || rng.gen_bool(0.7) { prev } else { rng.gen_range(0..a_size) };
            let out = rng.gen_range(a_size..n);
            g.insert_edge(inside, out).expect("vertices exist");
        }
        let phi = ratio(1, *[8i64, 12, 16, 32].choose(rng).expect("nonempty"));
        let view = g.weighted_view(&all_vertices(&g), ratio(0, 1)).expect("view").materialize();
        let a: Vec<bool> = (0..n).map(|i| view.global(i) < a_size).collect();
        // the trimming flow injects 2/φ per boundary edge and needs ΣΔ ≤ vol(A)/3
        let injected = 2 * *phi.denom() * view.cut(&a) as i64;
        if 3 * injected <= *phi.numer() * view.volume_of(&a) as i64 {
            return (view, a, phi);
        }
    }
}

/// Trimming: `vol(P) ≤ 4|E(A,Ā)|/φ` and `|E(A',Ā')| ≤ 2|E(A,Ā)|`.
pub fn trimming_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 100;
    let (tally, pruned) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 2, i);
        let mut t = Tally::default();
        let (view, a, phi) = trimming_instance(&mut rng);
        match decomp::trim(&view, &a, phi) {
            Err(e) => {
                t.record("trim_runs", false, "no error", || json!(e.to_string()));
                (t, 0)
            }
            Ok(out) => {
                t.record("trim_runs", true, "no error", || Value::Null);
                let before = view.cut(&a) as i64;
                let p: Vec<bool> = (0..view.n()).map(|x| a[x] && !out.a_prime[x]).collect();
                let vol = view.volume_of(&p) as i64;
                t.record("pruned_volume", vol * *phi.numer() <= 4 * before * *phi.denom(), "vol(P) ≤ 4|E(A,Ā)|/φ", || {
                    json!({ "vol": vol, "boundary": before, "phi": fmt_rational(phi) })
                });
                let after = view.cut(&out.a_prime) as i64;
                t.record("boundary_growth", after <= 2 * before, "|E(A',Ā')| ≤ 2|E(A,Ā)|", || {
                    json!({ "before": before, "after": after })
                });
                t.record("subset", out.a_prime.iter().zip(&a).all(|(&x, &y)| !x || y), "A' ⊆ A", || Value::Null);
                (t, p.iter().filter(|&&x| x).count())
            }
        }
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("instances_with_pruning".into(), json!(pruned.iter().filter(|&&k| k > 0).count()));
    BatteryReport { name: "trimming".into(), instances: count, report: tally.into_report(), metrics }
}

/// Static decomposition on small random graphs with the three properties,
/// exhaustive expansion for small clusters and the round bound.
pub fn decomposition_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 200;
    let (tally, rounds) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 3, i);
        let mut t = Tally::default();
        let n = rng.gen_range(2..=24);
        let m = rng.gen_range(0..=60);
        let g = random_multigraph(&mut rng, n, m);
        let phi = ratio(1, *[4i64, 8, 16, 32, 64].choose(&mut rng).expect("nonempty"));
        let alpha = ratio(1, *[16i64, 32, 64].choose(&mut rng).expect("nonempty"));
        let mut params = DecompParams::new(alpha, phi);
        params.audit = true;
        match decompose(&g, &all_vertices(&g), &params, rng.gen()) {
            Err(e) => {
                t.record("decompose_runs", false, "no error", || json!({ "error": e.to_string(), "edges": edge_list(&g) }));
                (t, 0)
            }
            Ok(d) => {
                t.record("decompose_runs", true, "no error", || Value::Null);
                let limit = cutmatch_log(m as u64).ceil() as usize + 2;
                t.record("rounds", d.rounds <= limit, "⌈log₂ m⌉ + 2", || json!({ "rounds": d.rounds, "limit": limit }));
                let rep = d.verify(&g, cfg.exhaustive_limit);
                for c in &rep.checks {
                    t.record(&c.name, c.passed, &c.threshold, || {
                        json!({ "witness": c.witness, "measured": c.measured, "edges": edge_list(&g), "alpha": fmt_rational(alpha), "phi": fmt_rational(phi) })
                    });
                }
                (t, d.rounds)
            }
        }
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("max_rounds".into(), json!(rounds.iter().max()));
    BatteryReport { name: "decomposition".into(), instances: count, report: tally.into_report(), metrics }
}

fn cutmatch_log(m: u64) -> f64 {
    crate::cutmatch::log2m(m)
}

/// A dense multigraph core plus a few lightly attached vertices forming `U`,
/// and some outside vertices; retried until `G[U]^w` is a `φ`-expander and
/// the update budget is positive. Returns the light vertices as well.
fn pruning_instance(rng: &mut ChaCha8Rng) -> (DynGraph, Vec<VertexId>, Vec<VertexId>, Rational, Rational, Rational) {
    loop {
        let core = rng.gen_range(6..=12);
        let light = rng.gen_range(1..=3);
        let nu = core + light;
        let no = rng.gen_range(1..=4);
        let n = nu + no;
        let mut g = DynGraph::with_vertices(n);
        let copies = rng.gen_range(4..=14);
        for _ in 0..copies {
            for x in 0..core {
                for y in x + 1..core {
                    if rng.gen_bool(0.8) {
                        g.insert_edge(x, y).expect("vertices exist");
                    }
                }
            }
        }
        for v in core..nu {
            for _ in 0..rng.gen_range(2..=5) {
                g.insert_edge(v, rng.gen_range(0..core)).expect("vertices exist");
            }
        }
        for _ in 0..rng.gen_range(1..=2 * no) {
            g.insert_edge(rng.gen_range(0..nu), rng.gen_range(nu..n)).expect("vertices exist");
        }
        let phi = ratio(1, *[2i64, 3, 4].choose(rng).expect("nonempty"));
        let alpha = phi * ratio(1, *[2i64, 4, 8].choose(rng).expect("nonempty"));
        let (lo, hi) = (alpha / phi, ratio(3, 5) / phi);
        let w = if rng.gen_bool(0.5) { lo } else { hi };
        let u: Vec<VertexId> = (0..nu).collect();
        let Ok(check) = oracle::check_weighted_expander(&g, &u, w, phi) else { continue };
        let k = PruningState::new(&g, &u, alpha, phi, w).map(|s| s.k_max()).unwrap_or(0);
        if check.holds && k > 0 {
            return (g, u, (core..nu).collect(), alpha, phi, w);
        }
    }
}

/// Degree of `v ∈ U` in `G[U]^w`.
fn view_degree(g: &DynGraph, inside: &[bool], v: VertexId, w: Rational) -> u64 {
    g.incident(v).map(|e| if inside[e.other(v)] { 1 } else { ceil_u64(w) }).sum()
}

/// Dynamic pruning: the four guarantees after every update of a full
/// budget, expansion checked by enumeration.
pub fn pruning_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 100;
    let (tally, sizes) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 4, i);
        let mut t = Tally::default();
        let (g0, u, light, alpha, phi, w) = pruning_instance(&mut rng);
        let n = g0.vertex_bound();
        let in_u = g0.mask(&u);
        let mut g = g0.clone();
        let mut st = PruningState::new(&g0, &u, alpha, phi, w).expect("valid parameters");
        t.record("p0_empty", st.pruned().is_empty(), "P_0 = ∅", || Value::Null);
        let victim = light[rng.gen_range(0..light.len())];
        let mut prev: Vec<VertexId> = Vec::new();
        let k = st.k_max();
        for step in 1..=k {
            let (op, a, b) = loop {
                if rng.gen_bool(0.6) {
                    // deletions concentrated at one vertex
                    let x = if rng.gen_bool(0.7) { victim } else { u[rng.gen_range(0..u.len())] };
                    let inc: Vec<_> = g.incident(x).filter(|e| !e.is_loop()).collect();
                    if let Some(e) = inc.choose(&mut rng) {
                        break (EdgeOp::Delete, e.u, e.v);
                    }
                } else {
                    let a = if rng.gen_bool(0.5) { victim } else { u[rng.gen_range(0..u.len())] };
                    let b = rng.gen_range(0..n);
                    if a != b {
                        break (EdgeOp::Insert, a, b);
                    }
                }
            };
            g.apply_edge_update(op, a, b).expect("valid update");
            if let Err(e) = st.apply(op, a, b) {
                t.record("apply", false, "in budget", || json!({ "step": step, "error": e.to_string() }));
                break;
            }
            let p = st.pruned().to_vec();
            let i64step = step as i64;
            t.record("monotone", prev.iter().all(|v| p.binary_search(v).is_ok()), "P_{i-1} ⊆ P_i", || json!({ "step": step }));
            t.record("subset", p.iter().all(|&v| in_u[v]), "P ⊆ U", || json!({ "step": step }));
            let vol: u64 = p.iter().map(|&v| view_degree(&g0, &in_u, v, w)).sum();
            t.record("volume", vol as i64 * *phi.numer() <= 32 * i64step * *phi.denom(), "vol_{G[U]^w}(P_i) ≤ 32i/φ", || {
                json!({ "step": step, "vol": vol })
            });
            let in_p = g0.mask(&p);
            let (mut to_rest, mut to_out) = (0u64, 0u64);
            for &v in &p {
                for e in g0.incident(v) {
                    let o = e.other(v);
                    if in_u[o] && !in_p[o] {
                        to_rest += 1;
                    } else if !in_u[o] {
                        to_out += 1;
                    }
                }
            }
            t.record("inner_boundary", to_rest <= 16 * step, "|E_G(P_i, U∖P_i)| ≤ 16i", || json!({ "step": step, "edges": to_rest }));
            t.record(
                "outer_boundary",
                to_out as i64 * *alpha.numer() <= 16 * i64step * *alpha.denom(),
                "|E_G(P_i, V∖U)| ≤ 16i/α",
                || json!({ "step": step, "edges": to_out }),
            );
            let rest: Vec<VertexId> = u.iter().copied().filter(|v| !in_p[*v]).collect();
            if rest.len() <= cfg.exhaustive_limit.min(oracle::ENUMERATION_LIMIT) {
                match oracle::check_weighted_expander_slack(&g, &rest, w, phi, 38) {
                    Ok(c) => t.record("expansion", c.holds, "G_i[U∖P_i]^w is a φ/38-expander", || {
                        json!({ "step": step, "conductance": c.conductance.map(fmt_rational), "cut": c.witness })
                    }),
                    Err(e) => t.record("expansion", false, "φ/38", || json!(e.to_string())),
                }
            }
            prev = p;
        }
        (t, (k, prev.len()))
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("updates".into(), json!(sizes.iter().map(|s| s.0).sum::<u64>()));
    metrics.insert("instances_with_pruning".into(), json!(sizes.iter().filter(|s| s.1 > 0).count()));
    BatteryReport { name: "pruning".into(), instances: count, report: tally.into_report(), metrics }
}

/// Union-find over the current edge set, rebuilt after deletions.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn rebuild(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut uf = Self::new(n);
        for &(a, b) in edges {
            uf.union(a, b);
        }
        uf
    }
}

/// The outcome of [`hierarchy_run`].
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct HierarchyRun {
    pub updates: u64,
    pub queries: u64,
    pub avg_recourse: f64,
    pub max_recourse: u64,
    /// `Σ_{i≥1} |E(G^i)|` after the run.
    pub contracted_edges: u64,
    pub contracted_bound: f64,
    pub final_depth: usize,
}

/// Random updates on `G(64, 160)` with periodic consistency checks and an
/// interleaved connectivity query per update.
pub fn hierarchy_run(cfg: &BatteryConfig, updates: usize, checkpoint: usize) -> (VerificationReport, HierarchyRun) {
    let mut t = Tally::default();
    let mut rng = rng_for(cfg.seed, 5, 0);
    let n = 64;
    let g = random_multigraph(&mut rng, n, 160);
    let mut params = cfg.dynamic.clone();
    params.seed = rng.gen();
    let mut h = match DynHierarchy::new(g.clone(), params.clone()) {
        Ok(h) => h,
        Err(e) => {
            t.record("build", false, "no error", || json!(e.to_string()));
            let run = HierarchyRun {
                updates: 0,
                queries: 0,
                avg_recourse: 0.0,
                max_recourse: 0,
                contracted_edges: 0,
                contracted_bound: 0.0,
                final_depth: 0,
            };
            return (t.into_report(), run);
        }
    };
    let mut edges = edge_list(&g);
    let mut uf = UnionFind::rebuild(n, &edges);
    let (mut total, mut worst, mut queries) = (0u64, 0u64, 0u64);
    let mut done = 0u64;
    for step in 1..=updates {
        let delete = !edges.is_empty() && rng.gen_bool(0.5);
        let result = if delete {
            let k = rng.gen_range(0..edges.len());
            let (a, b) = edges.swap_remove(k);
            uf = UnionFind::rebuild(n, &edges);
            h.apply(EdgeOp::Delete, a, b)
        } else {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
            uf.union(a, b);
            h.apply(EdgeOp::Insert, a, b)
        };
        match result {
            Ok(deltas) => {
                let size: u64 = deltas.iter().map(|d| d.len() as u64).sum();
                total += size;
                worst = worst.max(size);
                done += 1;
            }
            Err(e) => {
                t.record("apply", false, "no error", || json!({ "step": step, "error": e.to_string() }));
                break;
            }
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        queries += 1;
        let want = uf.find(a) == uf.find(b);
        let got = h.connected(a, b);
        t.record("connectivity", got.as_ref().ok() == Some(&want), "matches union-find", || {
            json!({ "step": step, "pair": [a, b], "expected": want, "answer": got.map_err(|e| e.to_string()) })
        });
        if step % checkpoint == 0 {
            let rep = h.check(cfg.exhaustive_limit);
            for c in &rep.checks {
                let kind = c.name.split('.').nth(1).unwrap_or(&c.name);
                t.record(kind, c.passed, "every level", || json!({ "step": step, "check": c.name, "witness": c.witness }));
            }
        }
    }
    let m = h.base().num_edges() as u64;
    let consts = params.decomp.constants(h.base().total_volume());
    let contracted: u64 = (1..=h.depth()).map(|i| h.graph(i).num_edges() as u64).sum();
    // initial boundary of U = V is zero
    let bound = consts.c1 as f64 * consts.log_m().powi(3) * to_f64(params.phi()) * m as f64;
    t.record("total_boundary", contracted as f64 <= bound, "C_1·log³m·φ·m + 4·out(V)", || {
        json!({ "contracted_edges": contracted, "bound": bound })
    });
    let avg = if done == 0 { 0.0 } else { total as f64 / done as f64 };
    t.record("recourse_ceiling", avg < RECOURSE_CEILING, &format!("< {RECOURSE_CEILING}"), || json!({ "avg_recourse": avg }));
    let run = HierarchyRun {
        updates: done,
        queries,
        avg_recourse: avg,
        max_recourse: worst,
        contracted_edges: contracted,
        contracted_bound: bound,
        final_depth: h.depth(),
    };
    (t.into_report(), run)
}

pub fn hierarchy_battery(cfg: &BatteryConfig) -> BatteryReport {
    let (report, run) = hierarchy_run(cfg, 10_000, 100);
    let mut metrics = BTreeMap::new();
    if let Value::Object(map) = json!(run) {
        metrics.extend(map);
    }
    BatteryReport { name: "hierarchy".into(), instances: 1, report, metrics }
}

fn random_disjoint_sets(rng: &mut ChaCha8Rng, n: usize) -> (Vec<VertexId>, Vec<VertexId>) {
    let mut verts: Vec<VertexId> = (0..n).collect();
    verts.shuffle(rng);
    let ka = rng.gen_range(1..n);
    let kb = rng.gen_range(1..=n - ka);
    let mut a = verts[..ka].to_vec();
    let mut b = verts[ka..ka + kb].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Tree flow sparsifier: `mincut_T(A,B) ≥ mincut_G(A,B)` and the ratio
/// against the ceiling 64.
pub fn sparsifier_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 100;
    let (tally, ratios) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 7, i);
        let mut t = Tally::default();
        let n = rng.gen_range(2..=20);
        let m = rng.gen_range(n - 1..=3 * n);
        let g = random_multigraph(&mut rng, n, m);
        let h = match build_static_hierarchy(&g, &DecompParams::default(), rng.gen(), 64) {
            Ok(h) => h,
            Err(e) => {
                t.record("hierarchy", false, "no error", || json!({ "error": e.to_string(), "edges": edge_list(&g) }));
                return (t, 0.0);
            }
        };
        let tree = apps::build_cap_tree(&h);
        let mut worst: f64 = 1.0;
        for _ in 0..50 {
            let (a, b) = random_disjoint_sets(&mut rng, n);
            let exact = oracle::exact_mincut_sets(&g, &a, &b).expect("valid sets").0;
            let tree_cut = apps::tree_mincut_sets(&tree, &a, &b).expect("valid sets");
            t.record("one_sided", tree_cut >= exact, "mincut_T ≥ mincut_G", || {
                json!({ "a": a, "b": b, "tree": tree_cut, "graph": exact, "edges": edge_list(&g) })
            });
            let ratio_ok = if exact == 0 { tree_cut == 0 } else { tree_cut <= 64 * exact };
            if exact > 0 {
                worst = worst.max(tree_cut as f64 / exact as f64);
            }
            t.record("ratio", ratio_ok, "mincut_T ≤ 64·mincut_G", || {
                json!({ "a": a, "b": b, "tree": tree_cut, "graph": exact, "edges": edge_list(&g) })
            });
        }
        (t, worst)
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("max_ratio".into(), json!(ratios.iter().copied().fold(1.0, f64::max)));
    BatteryReport { name: "sparsifier".into(), instances: count, report: tally.into_report(), metrics }
}

/// Random capacitated tree: leaves at level 0, internal nodes above.
fn random_cap_tree(rng: &mut ChaCha8Rng, edges: usize) -> CapTree {
    let total = edges + 1;
    let leaves = rng.gen_range(2..=total.saturating_sub(1).max(2));
    let internal = total - leaves;
    let mut nodes = Vec::with_capacity(total);
    // internal nodes form a random tree rooted at the first one
    for k in 0..internal {
        let parent = if k == 0 { None } else { Some(leaves + rng.gen_range(0..k)) };
        nodes.push((1usize, k, parent));
    }
    let mut out: Vec<TreeNode> = (0..leaves)
        .map(|v| {
            let parent = if internal == 0 { None } else { Some(leaves + rng.gen_range(0..internal)) };
            TreeNode { level: 0, vertex: v, parent, cap: rng.gen_range(0..=9), leaves: 0 }
        })
        .collect();
    for (level, vertex, parent) in nodes {
        let cap = if parent.is_some() { rng.gen_range(0..=9) } else { 0 };
        out.push(TreeNode { level, vertex, parent, cap, leaves: 0 });
    }
    CapTree::from_nodes(out)
}

/// Edges of a tree as (child, parent, cap).
fn tree_edges(t: &CapTree) -> Vec<(usize, usize, u64)> {
    t.nodes.iter().enumerate().filter_map(|(x, node)| node.parent.map(|p| (x, p, node.cap))).collect()
}

/// Exhaustive multiway cut: the cheapest edge subset whose removal
/// separates every pair of terminal leaves.
fn brute_multiway_cut(t: &CapTree, terminals: &[VertexId]) -> u64 {
    let es = tree_edges(t);
    let leaves: Vec<usize> = terminals.iter().map(|&v| t.leaf(v).expect("leaf")).collect();
    let mut best = INFINITE;
    for mask in 0u32..(1 << es.len()) {
        let cost: u64 = es.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e.2).sum();
        if cost >= best {
            continue;
        }
        let mut uf = UnionFind::new(t.len());
        for (k, &(c, p, _)) in es.iter().enumerate() {
            if mask >> k & 1 == 0 {
                uf.union(c, p);
            }
        }
        let mut roots: Vec<usize> = leaves.iter().map(|&x| uf.find(x)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() == leaves.len() {
            best = cost;
        }
    }
    best
}

/// Brute-force sparsest cut over single tree edges, with leaf counts taken
/// from an independent traversal.
fn brute_tree_sparsity(t: &CapTree) -> Rational {
    let n = t.num_leaves();
    let mut roots = 0;
    let mut best: Option<Rational> = None;
    for (x, node) in t.nodes.iter().enumerate() {
        let Some(_) = node.parent else {
            roots += 1;
            continue;
        };
        // count leaves whose ancestor chain passes through x
        let below = t
            .leaves()
            .filter(|&(_, leaf)| {
                let mut y = Some(leaf);
                while let Some(z) = y {
                    if z == x {
                        return true;
                    }
                    y = t.nodes[z].parent;
                }
                false
            })
            .count();
        let small = below.min(n - below);
        if small > 0 {
            let s = ratio(node.cap as i64, small as i64);
            best = Some(best.map_or(s, |b: Rational| b.min(s)));
        }
    }
    if roots > 1 {
        return ratio(0, 1);
    }
    best.unwrap_or(ratio(0, 1))
}

/// Tree queries against exact answers.
pub fn tree_query_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 100;
    let (tally, pairs) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 8, i);
        let mut t = Tally::default();
        let n = rng.gen_range(2..=20);
        let m = rng.gen_range(0..=3 * n);
        let g = random_multigraph(&mut rng, n, m);
        let mut audited = 0u64;
        if let Ok(h) = build_static_hierarchy(&g, &DecompParams::default(), rng.gen(), 64) {
            let tree = apps::build_cap_tree(&h);
            for _ in 0..10 {
                let s = rng.gen_range(0..n);
                let mut u = rng.gen_range(0..n - 1);
                if u >= s {
                    u += 1;
                }
                let est = apps::st_cut_estimate(&tree, s, u).expect("leaves");
                let exact = oracle::exact_mincut_sets(&g, &[s], &[u]).expect("valid").0;
                audited += 1;
                t.record("st_cut_upper", est >= exact, "estimate ≥ exact s-t mincut", || {
                    json!({ "s": s, "t": u, "estimate": est, "exact": exact, "edges": edge_list(&g) })
                });
            }
            let sc = apps::tree_sparsest_cut(&tree).expect("two leaves");
            let brute = brute_tree_sparsity(&tree);
            t.record("sparsest_cut", sc.sparsity == brute, "equals brute force over tree edges", || {
                json!({ "answer": fmt_rational(sc.sparsity), "brute": fmt_rational(brute) })
            });
            if tree_edges(&tree).len() <= 12 && n >= 2 {
                let k = rng.gen_range(2..=n.min(4));
                let mut terms: Vec<VertexId> = (0..n).collect();
                terms.shuffle(&mut rng);
                terms.truncate(k);
                let mw = apps::tree_multiway_cut(&tree, &terms).expect("terminals");
                let brute = brute_multiway_cut(&tree, &terms);
                t.record("multiway_cut", mw.value == brute, "equals exhaustive edge-subset search", || {
                    json!({ "terminals": terms, "answer": mw.value, "brute": brute })
                });
            }
        } else {
            t.record("hierarchy", false, "no error", || json!({ "edges": edge_list(&g) }));
        }
        // synthetic trees with at most 12 edges
        let size = rng.gen_range(2..=12);
        let tree = random_cap_tree(&mut rng, size);
        let sc = apps::tree_sparsest_cut(&tree).expect("two leaves");
        let brute = brute_tree_sparsity(&tree);
        t.record("sparsest_cut", sc.sparsity == brute, "equals brute force over tree edges", || {
            json!({ "answer": fmt_rational(sc.sparsity), "brute": fmt_rational(brute), "tree": tree_edges(&tree) })
        });
        let leaves = tree.num_leaves();
        let k = rng.gen_range(2..=leaves.min(5));
        let mut terms: Vec<VertexId> = (0..leaves).collect();
        terms.shuffle(&mut rng);
        terms.truncate(k);
        let mw = apps::tree_multiway_cut(&tree, &terms).expect("terminals");
        let brute = brute_multiway_cut(&tree, &terms);
        t.record("multiway_cut", mw.value == brute, "equals exhaustive edge-subset search", || {
            json!({ "terminals": terms, "answer": mw.value, "brute": brute, "tree": tree_edges(&tree) })
        });
        let cut_cost: u64 = mw.edges.iter().map(|&x| tree.nodes[x].cap).sum();
        t.record("multiway_edges", cut_cost == mw.value, "reported edges cost the value", || {
            json!({ "edges": mw.edges, "value": mw.value })
        });
        (t, audited)
    });
    let mut metrics = BTreeMap::new();
    metrics.insert("audited_pairs".into(), json!(pairs.iter().sum::<u64>()));
    BatteryReport { name: "tree_queries".into(), instances: count, report: tally.into_report(), metrics }
}

/// Tree-decomposition axioms on bounded-degree graphs; width against exact
/// treewidth for `n ≤ 10`.
pub fn treewidth_battery(cfg: &BatteryConfig) -> BatteryReport {
    let count = 100;
    let (tally, widths) = run_corpus(count, |i| {
        let mut rng = rng_for(cfg.seed, 9, i);
        let mut t = Tally::default();
        let n = rng.gen_range(1..=30);
        let g = bounded_degree_graph(&mut rng, n, 3 * n);
        let h = match build_static_hierarchy(&g, &DecompParams::default(), rng.gen(), 64) {
            Ok(h) => h,
            Err(e) => {
                t.record("hierarchy", false, "no error", || json!({ "error": e.to_string(), "edges": edge_list(&g) }));
                return (t, None);
            }
        };
        let bags = match apps::treewidth_bags(&h) {
            Ok(b) => b,
            Err(e) => {
                t.record("bags", false, "no error", || json!(e.to_string()));
                return (t, None);
            }
        };
        let rep = oracle::verify_tree_decomposition(&g, &bags.parent, &bags.bags);
        for c in rep.checks.iter().filter(|c| c.name != "width") {
            t.record(&c.name, c.passed, &c.threshold, || json!({ "witness": c.witness, "edges": edge_list(&g) }));
        }
        let exact = (n <= 10).then(|| oracle::exact_treewidth(&g).expect("small graph"));
        (t, Some((n, bags.width(), exact)))
    });
    let mut metrics = BTreeMap::new();
    let small: Vec<Value> = widths
        .iter()
        .flatten()
        .filter_map(|&(n, w, e)| e.map(|e| json!({ "n": n, "width": w, "treewidth": e })))
        .collect();
    metrics.insert("max_width".into(), json!(widths.iter().flatten().map(|x| x.1).max()));
    metrics.insert("small_graphs".into(), Value::Array(small));
    BatteryReport { name: "treewidth".into(), instances: count, report: tally.into_report(), metrics }
}

/// The batteries behind a name in [`BATTERIES`].
pub fn run_battery(name: &str, cfg: &BatteryConfig) -> Result<Vec<BatteryReport>> {
    let list: Vec<fn(&BatteryConfig) -> BatteryReport> = match name {
        "decomp" => vec![incflow_battery, trimming_battery, decomposition_battery],
        "prune" => vec![pruning_battery, hierarchy_battery],
        "sparsifier" => vec![sparsifier_battery, tree_query_battery],
        "treewidth" => vec![treewidth_battery],
        "all" => vec![
            incflow_battery,
            trimming_battery,
            decomposition_battery,
            pruning_battery,
            hierarchy_battery,
            sparsifier_battery,
            tree_query_battery,
            treewidth_battery,
        ],
        other => return Err(Error::Parameter(format!("unknown battery {other:?}; expected one of {BATTERIES:?}"))),
    };
    Ok(list.into_iter().map(|f| f(cfg)).collect())
}
