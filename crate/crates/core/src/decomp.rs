//! Trimming, cut-matching with trimming, the boundary-linked expander
//! decomposition, and the static expander hierarchy.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cutmatch::{self, Cut, CutMatchParams, CutMatchResult};
use crate::error::{Error, Result};
use crate::graph::{contract, DynGraph, VertexId, ViewGraph};
use crate::incflow::IncFlowState;
use crate::oracle::{self, DecompBounds};
use crate::rational::{fmt_rational, ratio, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    /// Sorted member vertices.
    pub members: Vec<VertexId>,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub phi: Rational,
    /// Expansion holds up to this factor: `G[C]^{α/φ}` is a `φ/slack`-expander.
    pub slack: u64,
}

/// Thresholds derived from `m = vol_G(U)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub m: u64,
    pub gamma_krv: u64,
    pub gamma_cmp: u64,
    pub c1: u64,
    pub theta3_mult: u64,
}

impl Constants {
    pub fn log_m(&self) -> f64 {
        cutmatch::log2m(self.m)
    }

    /// `mult · γ_cmp · log⁴m · φ · vol`.
    pub fn theta3(&self, phi: Rational, vol: u64) -> f64 {
        self.theta3_mult as f64 * self.gamma_cmp as f64 * self.log_m().powi(4) * to_f64(phi) * vol as f64
    }

    pub fn bounds(&self, exhaustive_limit: usize) -> DecompBounds {
        DecompBounds {
            m: self.m,
            gamma_cmp: self.gamma_cmp,
            c1: self.c1,
            theta3_mult: self.theta3_mult,
            exhaustive_limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompParams {
    pub alpha: Rational,
    pub phi: Rational,
    /// Overrides the default `⌈10 log² m⌉`.
    pub gamma_krv: Option<u64>,
    /// `C_1 = c1_mult · γ_cmp`.
    pub c1_mult: u64,
    pub theta3_mult: u64,
    pub exact_threshold: usize,
    pub rounds_scale: f64,
    /// Reject `α > 1/(4 γ_cmp log₂ m)` instead of recording it.
    pub strict_alpha: bool,
    /// Re-check every small certificate by enumeration.
    pub audit: bool,
}

impl DecompParams {
    pub fn new(alpha: Rational, phi: Rational) -> Self {
        Self {
            alpha,
            phi,
            gamma_krv: None,
            c1_mult: 16,
            theta3_mult: 80,
            exact_threshold: cutmatch::EXACT_THRESHOLD,
            rounds_scale: 1.0,
            strict_alpha: false,
            audit: false,
        }
    }

    pub fn constants(&self, m: u64) -> Constants {
        let gamma_krv = self.gamma_krv.unwrap_or_else(|| cutmatch::default_gamma_krv(m));
        let gamma_cmp = 2 * gamma_krv;
        Constants { m, gamma_krv, gamma_cmp, c1: self.c1_mult * gamma_cmp, theta3_mult: self.theta3_mult }
    }

    fn cut_params(&self, c: &Constants) -> CutMatchParams {
        CutMatchParams { gamma_krv: c.gamma_krv, exact_threshold: self.exact_threshold, rounds_scale: self.rounds_scale }
    }
}

impl Default for DecompParams {
    fn default() -> Self {
        Self::new(ratio(1, 16), ratio(1, 64))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub parent: Vec<VertexId>,
    pub clusters: Vec<Cluster>,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub phi: Rational,
    pub constants: Constants,
    pub rounds: usize,
    /// Whether `α ≤ 1/(4 γ_cmp log₂ m)` held.
    pub alpha_bound_ok: bool,
    /// Number of views whose weight had to be clamped below `1/(8φ̂)`.
    pub w_clamps: usize,
}

impl Decomposition {
    pub fn slack(&self) -> u64 {
        self.clusters.iter().map(|c| c.slack).max().unwrap_or(1)
    }

    /// `cluster <id> phi <p>/<q> members …`, one line per cluster.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.clusters.iter().enumerate() {
            let _ = write!(s, "cluster {i} phi {} members", fmt_rational(c.phi));
            for v in &c.members {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn verify(&self, graph: &DynGraph, exhaustive_limit: usize) -> oracle::VerificationReport {
        oracle::verify_decomposition(graph, &self.parent, self, &self.constants.bounds(exhaustive_limit))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimOutcome {
    /// Local mask (in the parent view) of the pruned set `P ⊆ A`.
    pub pruned: Vec<bool>,
    /// `A' = A \ P`.
    pub a_prime: Vec<bool>,
    /// `|E(A, Ā)|` in the parent view.
    pub boundary_before: u64,
    /// `|E(A', Ā')|` in the parent view.
    pub boundary_after: u64,
    pub pruned_volume: u64,
    /// The flow instance exceeded a third of its volume.
    pub void: bool,
}

/// Trims `A` inside `view`: incremental flow on `view[A]^1` with edge
/// capacity `2/φ` and `2/φ` units injected per boundary edge.
pub fn trim(view: &ViewGraph, a: &[bool], phi: Rational) -> Result<TrimOutcome> {
    if phi <= ratio(0, 1) || phi >= ratio(1, 2) {
        return Err(Error::Parameter(format!("phi must lie in (0, 1/2), got {phi}")));
    }
    let (p, q) = (*phi.numer(), *phi.denom());
    let sub = view.restrict(a, 1);
    let local: Vec<usize> = (0..view.n()).filter(|&i| a[i]).collect();
    let mut border = vec![0i64; sub.n()];
    for &(x, y) in view.edges() {
        let (x, y) = (x as usize, y as usize);
        if a[x] != a[y] {
            let inside = if a[x] { x } else { y };
            let j = local.binary_search(&inside).expect("member of A");
            border[j] += 1;
        }
    }
    let mut flow = IncFlowState::new(sub, 2 * q, p)?;
    for (j, &b) in border.iter().enumerate() {
        if b > 0 {
            flow.inject_source(j, 2 * q * b)?;
        }
    }
    let mut pruned = vec![false; view.n()];
    for &j in flow.pruned() {
        pruned[local[j]] = true;
    }
    let a_prime: Vec<bool> = (0..view.n()).map(|i| a[i] && !pruned[i]).collect();
    let boundary_before = view.cut(a);
    let boundary_after = view.cut(&a_prime);
    Ok(TrimOutcome {
        pruned_volume: view.volume_of(&pruned),
        pruned,
        a_prime,
        boundary_before,
        boundary_after,
        void: flow.guarantee_void(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmtResult {
    /// A sparse cut; both sides stay active.
    BalancedCut(Cut),
    /// `G[A]^w` is certified to be a `φ`-expander; `Ā` may be empty.
    SmallCut { cut: Cut, exact: bool },
}

/// One cut-matching step followed by trimming on a materialized view
/// `G[U_i]^w`.
pub fn cut_match_trim(view: &ViewGraph, phi: Rational, w: Rational, params: &CutMatchParams, seed: u64) -> Result<CmtResult> {
    if w * phi * 8 >= ratio(1, 1) {
        return Err(Error::Parameter(format!("w = {w} must be below 1/(8φ)")));
    }
    match cutmatch::cut_or_certify(view, phi, params, seed)? {
        CutMatchResult::Case1 { exact } => {
            Ok(CmtResult::SmallCut { cut: Cut::new(view, vec![false; view.n()]), exact })
        }
        CutMatchResult::Case2(cut) => Ok(CmtResult::BalancedCut(cut)),
        CutMatchResult::Case3(cut) => {
            let a: Vec<bool> = cut.a_bar.iter().map(|x| !x).collect();
            let t = trim(view, &a, phi)?;
            let a_bar: Vec<bool> = t.a_prime.iter().map(|x| !x).collect();
            let trimmed = Cut::new(view, a_bar);
            let small = 10 * trimmed.vol_a_bar <= view.volume();
            if t.void || !small || !t.a_prime.iter().any(|&x| x) {
                return Ok(CmtResult::BalancedCut(cut));
            }
            let exact = view.n() <= params.exact_threshold;
            Ok(CmtResult::SmallCut { cut: trimmed, exact })
        }
    }
}

/// The working expansion `max(Σout/Σvol / (8 γ_cmp log² m), φ)`, rounded
/// down to the form `1/k` when it exceeds `φ`.
fn working_phi(sum_out: u64, sum_vol: u64, c: &Constants, phi: Rational) -> Rational {
    if sum_vol == 0 {
        return phi;
    }
    let f = sum_out as f64 / sum_vol as f64 / (8.0 * c.gamma_cmp as f64 * c.log_m().powi(2));
    if f <= to_f64(phi) {
        return phi;
    }
    let k = (1.0 / f).ceil() as i64;
    ratio(1, k).max(phi)
}

/// The largest weight below `1/(8φ̂)` with the same ceiling behaviour.
fn clamp_weight(w: Rational, phi_hat: Rational) -> (Rational, bool) {
    let limit = (phi_hat * 8).recip();
    if w < limit {
        return (w, false);
    }
    (limit - Rational::new(1, 2 * *limit.denom()), true)
}

pub(crate) fn mix(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Work {
    members: Vec<VertexId>,
    certified: bool,
}

/// Computes an `(α, φ)`-expander decomposition of `U` (slack 1).
pub fn decompose(graph: &DynGraph, u: &[VertexId], params: &DecompParams, seed: u64) -> Result<Decomposition> {
    let mut parent = u.to_vec();
    parent.sort_unstable();
    parent.dedup();
    for &v in &parent {
        if !graph.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
    }
    if params.phi <= ratio(0, 1) || params.phi >= ratio(1, 2) {
        return Err(Error::Parameter(format!("phi must lie in (0, 1/2), got {}", params.phi)));
    }
    if params.alpha <= ratio(0, 1) {
        return Err(Error::Parameter("alpha must be positive".into()));
    }
    let m = graph.volume(parent.iter().copied());
    let consts = params.constants(m);
    let alpha_limit = 1.0 / (4.0 * consts.gamma_cmp as f64 * consts.log_m());
    let alpha_bound_ok = to_f64(params.alpha) <= alpha_limit;
    if params.strict_alpha && !alpha_bound_ok {
        return Err(Error::Parameter(format!(
            "alpha = {} exceeds 1/(4 gamma_cmp log m) = {alpha_limit:.3e}",
            fmt_rational(params.alpha)
        )));
    }
    let cut_params = params.cut_params(&consts);
    let round_limit = consts.log_m().ceil() as usize + 2;

    let mut active: Vec<Vec<VertexId>> = vec![parent.clone()];
    let mut done: Vec<Cluster> = Vec::new();
    let mut rounds = 0;
    let mut calls = 0u64;
    let mut w_clamps = 0;
    while !active.is_empty() {
        rounds += 1;
        if rounds > round_limit {
            return Err(Error::RoundLimit(round_limit));
        }
        let sum_out: u64 = active.iter().map(|c| graph.out(c)).sum();
        let sum_vol: u64 = active.iter().map(|c| graph.volume(c.iter().copied())).sum();
        let phi_hat = working_phi(sum_out, sum_vol, &consts, params.phi);
        let (w, clamped) = clamp_weight(params.alpha / phi_hat, phi_hat);

        let mut queue: Vec<Work> = active.drain(..).map(|members| Work { members, certified: false }).collect();
        let mut settled: Vec<Vec<VertexId>> = Vec::new();
        while let Some(item) = queue.pop() {
            // a single vertex is trivially an expander
            if item.certified || item.members.len() == 1 {
                settled.push(item.members);
                continue;
            }
            let view = graph.weighted_view(&item.members, w)?.materialize();
            if clamped {
                w_clamps += 1;
            }
            let comps = view.components();
            if comps.len() > 1 {
                for comp in comps {
                    let members = comp.iter().map(|&i| view.global(i)).collect();
                    queue.push(Work { members, certified: false });
                }
                continue;
            }
            calls += 1;
            match cut_match_trim(&view, phi_hat, w, &cut_params, mix(seed, calls))? {
                CmtResult::BalancedCut(cut) => {
                    let (a, b) = cut.sides(&view);
                    queue.push(Work { members: b, certified: false });
                    queue.push(Work { members: a, certified: false });
                }
                CmtResult::SmallCut { cut, exact } => {
                    let (a, b) = cut.sides(&view);
                    if params.audit && exact {
                        let r = oracle::check_weighted_expander(graph, &a, w, phi_hat)?;
                        if !r.holds {
                            return Err(Error::Consistency(format!(
                                "certified cluster of {} vertices has conductance {:?} < {}",
                                a.len(),
                                r.conductance,
                                fmt_rational(phi_hat)
                            )));
                        }
                    }
                    if !b.is_empty() {
                        queue.push(Work { members: b, certified: false });
                    }
                    queue.push(Work { members: a, certified: true });
                }
            }
        }
        for members in settled {
            let out = graph.out(&members);
            let vol = graph.volume(members.iter().copied());
            if out as f64 <= consts.theta3(phi_hat, vol) {
                done.push(Cluster { members, phi: phi_hat, slack: 1 });
            } else {
                active.push(members);
            }
        }
        active.sort();
    }
    for c in &mut done {
        c.members.sort_unstable();
    }
    done.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(Decomposition {
        parent,
        clusters: done,
        alpha: params.alpha,
        phi: params.phi,
        constants: consts,
        rounds,
        alpha_bound_ok,
        w_clamps,
    })
}

/// One level `G^i` of a hierarchy with its decomposition and parent map.
#[derive(Clone, Debug)]
pub struct HierLevel {
    pub graph: DynGraph,
    pub decomposition: Decomposition,
    /// `parent_of[v]`: the vertex of `G^{i+1}` that `v` is contracted into.
    pub parent_of: Vec<Option<VertexId>>,
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub levels: Vec<HierLevel>,
    /// The edgeless top graph `G^t`.
    pub top: DynGraph,
    pub alpha: Rational,
    pub phi: Rational,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn slack(&self) -> u64 {
        self.levels.iter().map(|l| l.decomposition.slack()).max().unwrap_or(1)
    }

    /// The graph `G^i` for `0 ≤ i ≤ t`.
    pub fn graph(&self, i: usize) -> &DynGraph {
        if i < self.levels.len() {
            &self.levels[i].graph
        } else {
            &self.top
        }
    }

    /// Level-prefixed clusters and tree edges.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, lvl) in self.levels.iter().enumerate() {
            for line in lvl.decomposition.to_text().lines() {
                let _ = writeln!(s, "level {i} {line}");
            }
            for v in lvl.graph.vertices() {
                if let Some(p) = lvl.parent_of[v] {
                    let _ = writeln!(s, "level {i} tree {v} {p} cap {}", lvl.graph.degree(v));
                }
            }
        }
        s
    }
}

/// Repeated decomposition and contraction until the level graph is edgeless.
pub fn build_static_hierarchy(graph: &DynGraph, params: &DecompParams, seed: u64, depth_cap: usize) -> Result<Hierarchy> {
    let mut levels = Vec::new();
    let mut current = graph.clone();
    while current.num_edges() > 0 {
        if levels.len() >= depth_cap {
            return Err(Error::DepthCap(depth_cap));
        }
        let all: Vec<VertexId> = current.vertices().collect();
        let d = decompose(&current, &all, params, mix(seed, levels.len() as u64))?;
        let parts: Vec<Vec<VertexId>> = d.clusters.iter().map(|c| c.members.clone()).collect();
        let contracted = contract(&current, &parts)?;
        let next = contracted.graph;
        levels.push(HierLevel { graph: std::mem::replace(&mut current, next), decomposition: d, parent_of: contracted.part_of });
    }
    Ok(Hierarchy { levels, top: current, alpha: params.alpha, phi: params.phi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> DynGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        DynGraph::from_edges(n, &e).unwrap()
    }

    fn dumbbell() -> DynGraph {
        let mut e = Vec::new();
        for off in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    e.push((off + i, off + j));
                }
            }
        }
        e.push((4, 5));
        DynGraph::from_edges(10, &e).unwrap()
    }

    fn all(g: &DynGraph) -> Vec<VertexId> {
        g.vertices().collect()
    }

    fn whole(g: &DynGraph, w: Rational) -> ViewGraph {
        g.weighted_view(&all(g), w).unwrap().materialize()
    }

    #[test]
    fn trim_without_boundary_keeps_a() {
        let g = complete(5);
        let view = whole(&g, ratio(1, 1));
        let t = trim(&view, &[true; 5], ratio(1, 10)).unwrap();
        assert!(t.pruned.iter().all(|&x| !x));
        assert_eq!(t.a_prime, vec![true; 5]);
    }

    #[test]
    fn trim_bounds_on_a_pendant_path() {
        // K6 with a pendant path 5-6-7-8: A = everything but 8
        let mut g = complete(6);
        for _ in 0..3 {
            g.add_vertex();
        }
        g.insert_edge(5, 6).unwrap();
        g.insert_edge(6, 7).unwrap();
        g.insert_edge(7, 8).unwrap();
        let view = whole(&g, ratio(0, 1));
        let a: Vec<bool> = (0..9).map(|i| i != 8).collect();
        let phi = ratio(1, 4);
        let t = trim(&view, &a, phi).unwrap();
        assert!(t.pruned_volume as i64 * *phi.numer() <= 4 * t.boundary_before as i64 * *phi.denom());
        assert!(t.boundary_after <= 2 * t.boundary_before);
    }

    #[test]
    fn cmt_rejects_large_weight() {
        let g = complete(4);
        let view = whole(&g, ratio(1, 1));
        let p = CutMatchParams::for_volume(12);
        assert!(cut_match_trim(&view, ratio(1, 16), ratio(2, 1), &p, 0).is_err());
        match cut_match_trim(&view, ratio(1, 16), ratio(1, 1), &p, 0).unwrap() {
            CmtResult::SmallCut { cut, .. } => assert!(cut.a_bar.iter().all(|&x| !x)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn edgeless_gives_singletons() {
        let g = DynGraph::with_vertices(5);
        let d = decompose(&g, &all(&g), &DecompParams::default(), 1).unwrap();
        assert_eq!(d.clusters.len(), 5);
        assert!(d.clusters.iter().all(|c| c.members.len() == 1));
        assert!(d.verify(&g, 16).passed());
    }

    #[test]
    fn k8_single_cluster_passes_oracle() {
        let g = complete(8);
        let mut p = DecompParams::new(ratio(1, 64), ratio(1, 64));
        p.audit = true;
        let d = decompose(&g, &all(&g), &p, 3).unwrap();
        assert_eq!(d.clusters.len(), 1);
        let r = d.verify(&g, 16);
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn dumbbell_property_one() {
        let g = dumbbell();
        let mut p = DecompParams::new(ratio(1, 128), ratio(1, 64));
        p.audit = true;
        let d = decompose(&g, &all(&g), &p, 5).unwrap();
        let r = d.verify(&g, 16);
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(d.clusters.len(), 2);
    }

    #[test]
    fn strict_alpha_rejects_defaults() {
        let g = complete(8);
        let mut p = DecompParams::default();
        p.strict_alpha = true;
        assert!(matches!(decompose(&g, &all(&g), &p, 0), Err(Error::Parameter(_))));
        let d = decompose(&g, &all(&g), &DecompParams::default(), 0).unwrap();
        assert!(!d.alpha_bound_ok);
    }

    #[test]
    fn k8_hierarchy_is_a_star() {
        let g = complete(8);
        let h = build_static_hierarchy(&g, &DecompParams::new(ratio(1, 64), ratio(1, 64)), 0, 64).unwrap();
        assert_eq!(h.depth(), 1);
        assert_eq!(h.top.num_vertices(), 1);
        let lvl = &h.levels[0];
        assert!(g.vertices().all(|v| lvl.parent_of[v] == Some(0) && lvl.graph.degree(v) == 7));
        assert!(h.to_text().contains("level 0 tree 3 0 cap 7"));
    }

    #[test]
    fn edgeless_hierarchy_has_depth_zero() {
        let h = build_static_hierarchy(&DynGraph::with_vertices(3), &DecompParams::default(), 0, 64).unwrap();
        assert_eq!(h.depth(), 0);
        assert_eq!(h.top.num_vertices(), 3);
    }

    #[test]
    fn decomposition_text_format() {
        let g = complete(3);
        let d = decompose(&g, &all(&g), &DecompParams::default(), 0).unwrap();
        assert_eq!(d.to_text(), "cluster 0 phi 1/64 members 0 1 2\n");
    }
}
