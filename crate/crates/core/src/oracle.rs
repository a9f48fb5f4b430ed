//! Brute-force and exact reference computations.
//!
//! Everything here reads the graph only through `DynGraph` accessors and uses
//! its own enumeration and flow code, so it can check the main algorithms.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::graph::{DynGraph, VertexId};
use crate::rational::{ceil_u64, fmt_rational, Rational};

/// Largest vertex count accepted by the exhaustive routines.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub threshold: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        measured: impl ToString,
        threshold: impl ToString,
        witness: Option<serde_json::Value>,
    ) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            measured: measured.to_string(),
            threshold: threshold.to_string(),
            witness: if passed { None } else { witness },
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Appends another report, prefixing its check names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Dense copy of `G[S]^w` private to the oracle.
struct Local {
    verts: Vec<VertexId>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    deg: Vec<u64>,
}

impl Local {
    fn build(graph: &DynGraph, set: &[VertexId], w: Rational) -> Result<Self> {
        let mut verts = set.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut index = vec![usize::MAX; graph.vertex_bound()];
        for (i, &v) in verts.iter().enumerate() {
            if !graph.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
            index[v] = i;
        }
        let loops_per = ceil_u64(w);
        let n = verts.len();
        let mut edges = Vec::new();
        let mut adj = vec![Vec::new(); n];
        let mut deg = vec![0u64; n];
        for (i, &v) in verts.iter().enumerate() {
            for e in graph.incident(v) {
                let o = if e.u == v { e.v } else { e.u };
                if o == v {
                    deg[i] += 1;
                } else if index[o] != usize::MAX {
                    deg[i] += 1;
                    let j = index[o];
                    if i < j {
                        edges.push((i, j));
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                } else {
                    deg[i] += loops_per;
                }
            }
        }
        Ok(Self { verts, edges, adj, deg })
    }

    fn n(&self) -> usize {
        self.verts.len()
    }
}

/// Minimum conductance of a graph; `value` is `None` with fewer than two
/// vertices (no proper cut exists).
#[derive(Clone, Debug, PartialEq)]
pub struct Conductance {
    pub value: Option<Rational>,
    pub side: Vec<VertexId>,
}

/// Gray-code walk over all cuts with the last vertex fixed outside; calls
/// `visit(mask, cut, vol_side)` for every nonempty proper side.
fn enumerate_cuts(l: &Local, mut visit: impl FnMut(u64, u64, u64)) {
    let n = l.n();
    if n < 2 {
        return;
    }
    let mut side = vec![false; n];
    let (mut mask, mut cut, mut vol) = (0u64, 0i64, 0u64);
    for k in 1u64..(1u64 << (n - 1)) {
        let x = k.trailing_zeros() as usize;
        let entering = !side[x];
        for &y in &l.adj[x] {
            if side[y] == side[x] {
                cut += 1;
            } else {
                cut -= 1;
            }
        }
        side[x] = entering;
        mask ^= 1 << x;
        if entering {
            vol += l.deg[x];
        } else {
            vol -= l.deg[x];
        }
        visit(mask, cut as u64, vol);
    }
}

fn mask_members(l: &Local, mask: u64) -> Vec<VertexId> {
    (0..l.n()).filter(|&i| mask >> i & 1 == 1).map(|i| l.verts[i]).collect()
}

fn min_conductance(l: &Local) -> Conductance {
    let total: u64 = l.deg.iter().sum();
    let mut best: Option<(u64, u64, u64)> = None;
    enumerate_cuts(l, |mask, cut, vol| {
        let minvol = vol.min(total - vol);
        let better = match best {
            None => true,
            Some((bc, bv, _)) => {
                let val_zero = cut == 0;
                let best_zero = bc == 0;
                if best_zero {
                    false
                } else {
                    val_zero || (cut as u128) * (bv as u128) < (bc as u128) * (minvol as u128)
                }
            }
        };
        if better {
            best = Some((cut, minvol, mask));
        }
    });
    match best {
        None => Conductance { value: None, side: Vec::new() },
        Some((cut, minvol, mask)) => {
            let value = if cut == 0 {
                Rational::zero()
            } else {
                Rational::new(cut as i64, minvol as i64)
            };
            Conductance { value: Some(value), side: mask_members(l, mask) }
        }
    }
}

/// Exhaustive minimum conductance of `G[S]^w`.
pub fn brute_conductance(graph: &DynGraph, set: &[VertexId], w: Rational) -> Result<Conductance> {
    let l = Local::build(graph, set, w)?;
    if l.n() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { size: l.n(), limit: ENUMERATION_LIMIT });
    }
    Ok(min_conductance(&l))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpanderCheck {
    pub holds: bool,
    pub conductance: Option<Rational>,
    /// A violating side when `holds` is false.
    pub witness: Vec<VertexId>,
}

/// Whether `G[S]^w` is a `target`-expander, by enumeration.
pub fn check_weighted_expander(graph: &DynGraph, set: &[VertexId], w: Rational, target: Rational) -> Result<ExpanderCheck> {
    check_weighted_expander_slack(graph, set, w, target, 1)
}

/// Same as [`check_weighted_expander`] with target `phi / slack`, compared
/// exactly in wide integers.
pub fn check_weighted_expander_slack(
    graph: &DynGraph,
    set: &[VertexId],
    w: Rational,
    phi: Rational,
    slack: u64,
) -> Result<ExpanderCheck> {
    let c = brute_conductance(graph, set, w)?;
    let holds = match c.value {
        None => true,
        Some(v) => meets(v, phi, slack),
    };
    Ok(ExpanderCheck { holds, conductance: c.value, witness: if holds { Vec::new() } else { c.side } })
}

/// `value ≥ phi / slack`.
fn meets(value: Rational, phi: Rational, slack: u64) -> bool {
    let lhs = *value.numer() as i128 * *phi.denom() as i128 * slack as i128;
    let rhs = *phi.numer() as i128 * *value.denom() as i128;
    lhs >= rhs
}

/// Cheeger lower bound `λ₂/2 ≤ Φ` for `G[S]^w`, from the normalized Laplacian.
/// Returns 0 for graphs with an isolated vertex or fewer than two vertices.
pub fn cheeger_lower_bound(graph: &DynGraph, set: &[VertexId], w: Rational) -> Result<f64> {
    let l = Local::build(graph, set, w)?;
    let n = l.n();
    if n < 2 || l.deg.contains(&0) {
        return Ok(0.0);
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let internal = l.adj[i].len() as u64;
        a[(i, i)] = (l.deg[i] - internal) as f64;
    }
    for &(i, j) in &l.edges {
        a[(i, j)] += 1.0;
        a[(j, i)] += 1.0;
    }
    let mut lap = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            lap[(i, j)] -= a[(i, j)] / ((l.deg[i] * l.deg[j]) as f64).sqrt();
        }
    }
    let mut ev: Vec<f64> = lap.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok((ev[1] / 2.0).max(0.0))
}

/// Exact `mincut_G(A, B)` by shortest augmenting paths with unit capacities.
pub fn exact_mincut_sets(graph: &DynGraph, a: &[VertexId], b: &[VertexId]) -> Result<(u64, Vec<VertexId>)> {
    let nb = graph.vertex_bound();
    let mut role = vec![0u8; nb];
    for &x in a {
        if !graph.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
        role[x] = 1;
    }
    for &x in b {
        if !graph.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
        if role[x] == 1 {
            return Err(Error::InvalidPartition(format!("vertex {x} in both terminal sets")));
        }
        role[x] = 2;
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidPartition("terminal sets must be nonempty".into()));
    }
    // arcs: to, residual capacity; arc k pairs with k ^ 1
    let (s, t) = (nb, nb + 1);
    let mut head: Vec<Vec<usize>> = vec![Vec::new(); nb + 2];
    let mut to = Vec::new();
    let mut cap: Vec<i64> = Vec::new();
    let mut add = |u: usize, v: usize, c1: i64, c2: i64, head: &mut Vec<Vec<usize>>| {
        head[u].push(to.len());
        to.push(v);
        cap.push(c1);
        head[v].push(to.len());
        to.push(u);
        cap.push(c2);
    };
    for e in graph.sorted_edges() {
        if e.u != e.v {
            add(e.u, e.v, 1, 1, &mut head);
        }
    }
    let big = graph.num_edges() as i64 + 1;
    for v in graph.vertices() {
        match role[v] {
            1 => add(s, v, big, 0, &mut head),
            2 => add(v, t, big, 0, &mut head),
            _ => {}
        }
    }
    let mut value = 0u64;
    loop {
        let mut pred = vec![usize::MAX; nb + 2];
        let mut seen = vec![false; nb + 2];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &k in &head[x] {
                if cap[k] > 0 && !seen[to[k]] {
                    seen[to[k]] = true;
                    pred[to[k]] = k;
                    q.push_back(to[k]);
                }
            }
        }
        if !seen[t] {
            let side = graph.vertices().filter(|&v| seen[v]).collect();
            return Ok((value, side));
        }
        let mut x = t;
        while x != s {
            let k = pred[x];
            cap[k] -= 1;
            cap[k ^ 1] += 1;
            x = to[k ^ 1];
        }
        value += 1;
    }
}

/// Exhaustive minimum of `|δ(S)| / min(|S|, |S̄|)` over the live vertices.
pub fn brute_sparsest_cut(graph: &DynGraph) -> Result<(Option<Rational>, Vec<VertexId>)> {
    let verts: Vec<VertexId> = graph.vertices().collect();
    let l = Local::build(graph, &verts, Rational::zero())?;
    let n = l.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { size: n, limit: ENUMERATION_LIMIT });
    }
    let mut best: Option<(u64, u64, u64)> = None;
    enumerate_cuts(&l, |mask, cut, _| {
        let k = mask.count_ones() as u64;
        let small = k.min(n as u64 - k);
        if best.is_none_or(|(bc, bs, _)| (cut as u128) * (bs as u128) < (bc as u128) * (small as u128)) {
            best = Some((cut, small, mask));
        }
    });
    Ok(match best {
        None => (None, Vec::new()),
        Some((cut, small, mask)) => (Some(Rational::new(cut as i64, small as i64)), mask_members(&l, mask)),
    })
}

/// Constants for [`verify_decomposition`].
#[derive(Clone, Debug)]
pub struct DecompBounds {
    /// The `m` inside the logarithms.
    pub m: u64,
    pub gamma_cmp: u64,
    /// Property-1 constant `C_1`.
    pub c1: u64,
    /// Multiplier in `Θ_3 = mult·γ_cmp·log⁴m·φ_i·vol(U_i)`.
    pub theta3_mult: u64,
    /// Clusters up to this size are checked by enumeration, larger ones by
    /// the Cheeger bound.
    pub exhaustive_limit: usize,
}

impl DecompBounds {
    pub fn log_m(&self) -> f64 {
        (self.m.max(2) as f64).log2()
    }
}

/// Checks the partition and the three decomposition properties.
pub fn verify_decomposition(graph: &DynGraph, u: &[VertexId], d: &Decomposition, b: &DecompBounds) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let log_m = b.log_m();

    let mut owner = vec![usize::MAX; graph.vertex_bound()];
    let mut partition_issue = None;
    for (i, c) in d.clusters.iter().enumerate() {
        for &v in &c.members {
            if v >= owner.len() || !graph.contains_vertex(v) {
                partition_issue.get_or_insert(json!({"unknown_vertex": v}));
            } else if owner[v] != usize::MAX {
                partition_issue.get_or_insert(json!({"vertex": v, "clusters": [owner[v], i]}));
            } else {
                owner[v] = i;
            }
        }
    }
    let in_u = graph.mask(u);
    for &v in u {
        if v < owner.len() && owner[v] == usize::MAX {
            partition_issue.get_or_insert(json!({"uncovered": v}));
        }
    }
    for (v, &o) in owner.iter().enumerate() {
        if o != usize::MAX && !in_u[v] {
            partition_issue.get_or_insert(json!({"outside_parent": v}));
        }
    }
    rep.push("partition", partition_issue.is_none(), d.clusters.len(), "disjoint cover", partition_issue);

    let low = d.clusters.iter().position(|c| c.phi < d.phi);
    rep.push(
        "phi_lower_bound",
        low.is_none(),
        low.map_or("ok".to_string(), |i| fmt_rational(d.clusters[i].phi)),
        fmt_rational(d.phi),
        low.map(|i| json!({"cluster": i})),
    );

    let sum_out: u64 = d.clusters.iter().map(|c| graph.out(&c.members)).sum();
    let out_u = graph.out(u);
    let vol_u = graph.volume(u.iter().copied());
    let bound1 = 4.0 * out_u as f64 + b.c1 as f64 * log_m.powi(3) * crate::rational::to_f64(d.phi) * vol_u as f64;
    rep.push("property1", sum_out as f64 <= bound1, sum_out, bound1, Some(json!({"sum_out": sum_out})));

    let mut p2_fail = None;
    let mut p3_fail = None;
    let mut exhaustive = 0usize;
    let mut spectral = 0usize;
    for (i, c) in d.clusters.iter().enumerate() {
        if c.members.len() < 2 {
            continue;
        }
        let w = d.alpha / c.phi;
        if c.members.len() <= b.exhaustive_limit.min(ENUMERATION_LIMIT) {
            exhaustive += 1;
            match check_weighted_expander_slack(graph, &c.members, w, c.phi, c.slack) {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    p2_fail.get_or_insert(json!({
                        "cluster": i,
                        "conductance": r.conductance.map(fmt_rational),
                        "target": format!("{}/{}", fmt_rational(c.phi), c.slack),
                        "cut": r.witness,
                    }));
                }
                Err(e) => {
                    p2_fail.get_or_insert(json!({"cluster": i, "error": e.to_string()}));
                }
            }
        } else {
            spectral += 1;
            let lb = cheeger_lower_bound(graph, &c.members, w).unwrap_or(0.0);
            let target = crate::rational::to_f64(c.phi) / c.slack as f64;
            if lb + 1e-12 < target {
                p2_fail.get_or_insert(json!({"cluster": i, "cheeger_lower_bound": lb, "target": target}));
            }
        }
        let out = graph.out(&c.members);
        let bound3 = b.theta3_mult as f64
            * b.gamma_cmp as f64
            * log_m.powi(4)
            * crate::rational::to_f64(c.phi)
            * graph.volume(c.members.iter().copied()) as f64;
        if out as f64 > bound3 {
            p3_fail.get_or_insert(json!({"cluster": i, "out": out, "bound": bound3}));
        }
    }
    rep.push(
        "property2",
        p2_fail.is_none(),
        format!("{exhaustive} exhaustive, {spectral} spectral"),
        "phi_i/slack",
        p2_fail,
    );
    rep.push("property3", p3_fail.is_none(), d.clusters.len(), "theta3", p3_fail);
    rep
}

/// Checks vertex coverage, edge coverage and connected occurrences for a
/// decomposition tree given by parent pointers.
pub fn verify_tree_decomposition(
    graph: &DynGraph,
    parent: &[Option<usize>],
    bags: &[Vec<VertexId>],
) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let nodes = parent.len();
    let nb = graph.vertex_bound();

    // parent pointers must be acyclic
    let mut cyclic = None;
    for x in 0..nodes {
        let mut y = x;
        let mut steps = 0;
        while let Some(p) = parent[y] {
            if p >= nodes || steps > nodes {
                cyclic = Some(x);
                break;
            }
            y = p;
            steps += 1;
        }
    }
    rep.push("forest", cyclic.is_none() && bags.len() == nodes, nodes, "acyclic", cyclic.map(|x| json!({"node": x})));
    if cyclic.is_some() || bags.len() != nodes {
        return rep;
    }

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); nb];
    let mut in_bag = vec![std::collections::BTreeSet::new(); nodes];
    for (x, bag) in bags.iter().enumerate() {
        for &v in bag {
            if v < nb && in_bag[x].insert(v) {
                holders[v].push(x);
            }
        }
    }
    let missing = graph.vertices().find(|&v| holders[v].is_empty());
    rep.push("vertex_coverage", missing.is_none(), graph.num_vertices(), "every vertex in a bag", missing.map(|v| json!({"vertex": v})));

    let uncovered = graph.sorted_edges().into_iter().find(|e| {
        !e.is_loop() && !holders[e.u].iter().any(|&x| in_bag[x].contains(&e.v))
    });
    rep.push(
        "edge_coverage",
        uncovered.is_none(),
        graph.num_edges(),
        "every edge in a bag",
        uncovered.map(|e| json!({"edge": [e.u, e.v]})),
    );

    let mut split = None;
    for v in graph.vertices() {
        let hs = &holders[v];
        if hs.is_empty() {
            continue;
        }
        let linked = hs.iter().filter(|&&x| parent[x].is_some_and(|p| in_bag[p].contains(&v))).count();
        if hs.len() - linked != 1 {
            let tops: Vec<usize> =
                hs.iter().copied().filter(|&x| !parent[x].is_some_and(|p| in_bag[p].contains(&v))).collect();
            split = Some(json!({"vertex": v, "disconnected_nodes": tops}));
            break;
        }
    }
    rep.push("connected_occurrences", split.is_none(), graph.num_vertices(), "one subtree per vertex", split);
    let width = bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1);
    rep.push("width", true, width, "reported", None);
    rep
}

/// Exact treewidth by dynamic programming over vertex subsets (n ≤ 10).
pub fn exact_treewidth(graph: &DynGraph) -> Result<usize> {
    let verts: Vec<VertexId> = graph.vertices().collect();
    let n = verts.len();
    if n > 10 {
        return Err(Error::TooLarge { size: n, limit: 10 });
    }
    if n == 0 {
        return Ok(0);
    }
    let l = Local::build(graph, &verts, Rational::zero())?;
    let mut nbr = vec![0u32; n];
    for &(a, b) in &l.edges {
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
    }
    // q(s, v): vertices outside s ∪ {v} reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut reach = 1u32 << v;
        let mut frontier = reach;
        let mut out = 0u32;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nx = nbr[x] & !reach;
            out |= nx & !s;
            let inner = nx & s;
            reach |= inner;
            frontier |= inner;
        }
        out & !(1 << v)
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![usize::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = usize::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = tw[prev as usize].max(q(prev, v).count_ones() as usize);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn complete(n: usize) -> DynGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        DynGraph::from_edges(n, &e).unwrap()
    }

    fn cycle(n: usize) -> DynGraph {
        DynGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
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

    #[test]
    fn conductance_small_graphs() {
        let k4 = complete(4);
        assert_eq!(brute_conductance(&k4, &all(&k4), ratio(1, 1)).unwrap().value, Some(ratio(2, 3)));
        let c4 = cycle(4);
        assert_eq!(brute_conductance(&c4, &all(&c4), ratio(1, 1)).unwrap().value, Some(ratio(1, 2)));
        let two = DynGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(brute_conductance(&two, &all(&two), ratio(1, 1)).unwrap().value, Some(ratio(0, 1)));
        let k8 = complete(8);
        assert_eq!(brute_conductance(&k8, &all(&k8), ratio(1, 1)).unwrap().value, Some(ratio(4, 7)));
        let db = dumbbell();
        assert_eq!(brute_conductance(&db, &all(&db), ratio(1, 1)).unwrap().value, Some(ratio(1, 21)));
    }

    #[test]
    fn weighted_expander_checks() {
        let k8 = complete(8);
        assert!(check_weighted_expander(&k8, &all(&k8), ratio(1, 1), ratio(1, 2)).unwrap().holds);
        let db = dumbbell();
        let r = check_weighted_expander(&db, &all(&db), ratio(1, 1), ratio(1, 10)).unwrap();
        assert!(!r.holds);
        let mut side = r.witness.clone();
        side.sort_unstable();
        assert!(side == vec![0, 1, 2, 3, 4] || side == vec![5, 6, 7, 8, 9]);
        assert!(check_weighted_expander(&db, &[3], ratio(1, 1), ratio(1, 2)).unwrap().holds);
    }

    #[test]
    fn cheeger_is_below_truth() {
        for g in [complete(6), cycle(8), dumbbell()] {
            let v = all(&g);
            let exact = crate::rational::to_f64(brute_conductance(&g, &v, ratio(1, 1)).unwrap().value.unwrap());
            let lb = cheeger_lower_bound(&g, &v, ratio(1, 1)).unwrap();
            assert!(lb <= exact + 1e-9, "{lb} > {exact}");
            assert!(lb > 0.0);
        }
    }

    #[test]
    fn mincut_examples() {
        let tri = complete(3);
        assert_eq!(exact_mincut_sets(&tri, &[0], &[1]).unwrap().0, 2);
        let two = DynGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(exact_mincut_sets(&two, &[0], &[2]).unwrap().0, 0);
        let k4 = complete(4);
        assert_eq!(exact_mincut_sets(&k4, &[0, 1], &[2, 3]).unwrap().0, 4);
        assert!(exact_mincut_sets(&k4, &[0, 1], &[1]).is_err());
    }

    #[test]
    fn sparsest_cut_examples() {
        assert_eq!(brute_sparsest_cut(&cycle(6)).unwrap().0, Some(ratio(2, 3)));
        assert_eq!(brute_sparsest_cut(&complete(4)).unwrap().0, Some(ratio(2, 1)));
        let two = DynGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(brute_sparsest_cut(&two).unwrap().0, Some(ratio(0, 1)));
    }

    #[test]
    fn tree_decomposition_checks() {
        let tri = complete(3);
        let ok = verify_tree_decomposition(&tri, &[None], &[vec![0, 1, 2]]);
        assert!(ok.passed());
        assert_eq!(ok.checks.last().unwrap().measured, "2");
        // path 0-1-2: vertex 1 occurs in two nodes separated by a node without it
        let path = DynGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let bad = verify_tree_decomposition(&path, &[None, Some(0), Some(1)], &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(!bad.passed());
        let c = bad.failures().next().unwrap();
        assert_eq!(c.name, "connected_occurrences");
        assert!(c.witness.is_some());
    }

    #[test]
    fn treewidth_small() {
        assert_eq!(exact_treewidth(&complete(5)).unwrap(), 4);
        assert_eq!(exact_treewidth(&cycle(7)).unwrap(), 2);
        let tree = DynGraph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(exact_treewidth(&tree).unwrap(), 1);
        assert_eq!(exact_treewidth(&DynGraph::with_vertices(4)).unwrap(), 0);
    }
}
