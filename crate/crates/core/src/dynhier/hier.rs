use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::decomp::{Cluster, Decomposition, HierLevel, Hierarchy};
use crate::error::{Error, Result};
use crate::graph::{contract, DynGraph, EdgeId, EdgeOp, VertexId};
use crate::oracle::{self, VerificationReport};
use crate::rational::{fmt_rational, to_f64};

use super::process::EdState;
use super::{Counters, Ctx, DynParams};

/// One change to a contracted graph. Edges keep their origin id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DeltaOp {
    DeleteEdge { id: EdgeId, u: VertexId, v: VertexId },
    RemoveVertex { v: VertexId },
    AddVertex { v: VertexId },
    InsertEdge { id: EdgeId, u: VertexId, v: VertexId },
}

/// Changes to `G^level`, ordered: edge deletions, vertex removals, vertex
/// additions, edge insertions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RecourseDelta {
    pub level: usize,
    /// The graph is rebuilt: after the removals it restarts from an empty graph.
    pub reset: bool,
    pub ops: Vec<DeltaOp>,
}

impl RecourseDelta {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Applies the delta to a copy of the graph it was computed for.
    pub fn replay(&self, g: &mut DynGraph) -> Result<()> {
        let mut fresh = !self.reset;
        for op in &self.ops {
            if !fresh && matches!(op, DeltaOp::AddVertex { .. } | DeltaOp::InsertEdge { .. }) {
                *g = DynGraph::new();
                fresh = true;
            }
            match *op {
                DeltaOp::DeleteEdge { id, .. } => {
                    g.delete_edge_by_id(id)?;
                }
                DeltaOp::RemoveVertex { v } => g.remove_vertex(v)?,
                DeltaOp::AddVertex { v } => {
                    let got = g.add_vertex();
                    if got != v {
                        return Err(Error::Consistency(format!("replay allocated vertex {got}, delta names {v}")));
                    }
                }
                DeltaOp::InsertEdge { id, u, v } => g.insert_edge_with_id(u, v, id)?,
            }
        }
        if !fresh {
            *g = DynGraph::new();
        }
        Ok(())
    }

    /// Full replacement of `old` by `new`.
    fn replacement(level: usize, old: Option<&DynGraph>, new: Option<&DynGraph>) -> Self {
        let mut ops = Vec::new();
        if let Some(g) = old {
            ops.extend(g.sorted_edges().into_iter().map(|e| DeltaOp::DeleteEdge { id: e.id, u: e.u, v: e.v }));
            ops.extend(g.vertices().map(|v| DeltaOp::RemoveVertex { v }));
        }
        if let Some(g) = new {
            ops.extend(g.vertices().map(|v| DeltaOp::AddVertex { v }));
            ops.extend(g.sorted_edges().into_iter().map(|e| DeltaOp::InsertEdge { id: e.id, u: e.u, v: e.v }));
        }
        Self { level, reset: true, ops }
    }
}

#[derive(Clone, Copy, Debug)]
enum LevelOp {
    Edge(EdgeOp, VertexId, VertexId, EdgeId),
    Add(VertexId),
    Remove(VertexId),
}

fn level_ops(delta: &RecourseDelta) -> Vec<LevelOp> {
    delta
        .ops
        .iter()
        .map(|op| match *op {
            DeltaOp::DeleteEdge { id, u, v } => LevelOp::Edge(EdgeOp::Delete, u, v, id),
            DeltaOp::RemoveVertex { v } => LevelOp::Remove(v),
            DeltaOp::AddVertex { v } => LevelOp::Add(v),
            DeltaOp::InsertEdge { id, u, v } => LevelOp::Edge(EdgeOp::Insert, u, v, id),
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DynStats {
    pub updates: u64,
    pub restarts: u64,
    pub expiries: u64,
    pub pruner_expiries: u64,
    pub snapshots: u64,
    pub decompositions: u64,
    pub level_rebuilds: u64,
    pub recourse_total: u64,
    pub recourse_max: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub vertices: usize,
    pub edges: usize,
    pub volume: u64,
    pub clusters: usize,
    pub updates: u64,
    pub budget: u64,
}

/// The ED-process of one level together with the contracted graph it induces.
#[derive(Clone, Debug)]
pub struct DynamicEd {
    root: EdState,
    contracted: DynGraph,
    key_of: Vec<Option<u64>>,
    super_of_key: BTreeMap<u64, VertexId>,
    count: HashMap<u64, usize>,
    image: HashMap<EdgeId, (u64, u64)>,
    updates: u64,
    budget: u64,
}

fn ordered(a: u64, b: u64) -> (u64, u64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl DynamicEd {
    fn build(graph: &DynGraph, params: &DynParams, counters: &mut Counters) -> Result<Self> {
        let mut ctx = Ctx { graph, params, counters, dirty: Vec::new() };
        let root = EdState::new(&mut ctx, graph.vertices().collect(), params.phi())?;
        let mut ed = Self {
            root,
            contracted: DynGraph::new(),
            key_of: vec![None; graph.vertex_bound()],
            super_of_key: BTreeMap::new(),
            count: HashMap::new(),
            image: HashMap::new(),
            updates: 0,
            budget: params.level_budget(graph.num_edges() as u64),
        };
        for v in graph.vertices() {
            let k = ed.root.key_of(v).ok_or_else(|| Error::Consistency(format!("vertex {v} unclustered")))?;
            ed.key_of[v] = Some(k);
            *ed.count.entry(k).or_default() += 1;
        }
        let keys: BTreeSet<u64> = ed.count.keys().copied().collect();
        for k in keys {
            let s = ed.contracted.add_vertex();
            ed.super_of_key.insert(k, s);
        }
        for e in graph.sorted_edges() {
            let (ka, kb) = (ed.key_of[e.u].unwrap(), ed.key_of[e.v].unwrap());
            if ka != kb {
                ed.contracted.insert_edge_with_id(ed.super_of_key[&ka], ed.super_of_key[&kb], e.id)?;
                ed.image.insert(e.id, ordered(ka, kb));
            }
        }
        Ok(ed)
    }

    /// Feeds one batch of ops to the level. Returns one delta, or two when the
    /// level was re-decomposed because it stopped contracting anything.
    fn apply(&mut self, graph: &DynGraph, params: &DynParams, counters: &mut Counters, ops: &[LevelOp], level: usize) -> Result<Vec<RecourseDelta>> {
        counters.batch += 1;
        let mut ctx = Ctx { graph, params, counters, dirty: Vec::new() };
        let mut raw = Vec::new();
        for &op in ops {
            match op {
                LevelOp::Edge(kind, u, v, id) => {
                    self.root.apply(&mut ctx, kind, u, v)?;
                    raw.push(id);
                }
                LevelOp::Add(v) => self.root.add_vertex(&mut ctx, v)?,
                LevelOp::Remove(v) => self.root.remove_vertex(&mut ctx, v)?,
            }
        }
        self.updates += ops.len() as u64;
        let mut dirty = std::mem::take(&mut ctx.dirty);
        let mut rebuilt = false;
        if self.updates >= self.budget && graph.num_edges() > 0 {
            dirty.extend(self.rebuild(graph, params, counters)?);
            rebuilt = true;
        }
        let mut out = vec![self.sync(graph, dirty, raw, level)?];
        // a level that contracts nothing would be copied upward forever
        let stalled = self.contracted.num_edges() > 0 && self.contracted.num_edges() == graph.num_edges();
        if stalled && !rebuilt {
            let dirty = self.rebuild(graph, params, counters)?;
            out.push(self.sync(graph, dirty, Vec::new(), level)?);
        }
        Ok(out)
    }

    /// Re-decomposes the whole level with a fresh budget; clusters that come
    /// out unchanged keep their supervertex. Returns the vertices to resync.
    fn rebuild(&mut self, graph: &DynGraph, params: &DynParams, counters: &mut Counters) -> Result<Vec<VertexId>> {
        counters.stats.level_rebuilds += 1;
        counters.batch += 1;
        let mut ctx = Ctx { graph, params, counters, dirty: Vec::new() };
        self.root.rebuild(&mut ctx)?;
        self.updates = 0;
        self.budget = params.level_budget(graph.num_edges() as u64);
        Ok(ctx.dirty)
    }

    /// Recomputes the supervertex of every dirty vertex and the image of every
    /// candidate edge, and applies the difference to the contracted graph.
    fn sync(&mut self, graph: &DynGraph, mut dirty: Vec<VertexId>, raw: Vec<EdgeId>, level: usize) -> Result<RecourseDelta> {
        dirty.sort_unstable();
        dirty.dedup();
        if self.key_of.len() < graph.vertex_bound() {
            self.key_of.resize(graph.vertex_bound(), None);
        }

        let mut touched = BTreeSet::new();
        let mut candidates = raw;
        for x in dirty {
            let new = if graph.contains_vertex(x) {
                Some(self.root.key_of(x).ok_or_else(|| Error::Consistency(format!("vertex {x} unclustered")))?)
            } else {
                None
            };
            let old = self.key_of.get(x).copied().flatten();
            if old == new {
                continue;
            }
            if let Some(k) = old {
                *self.count.get_mut(&k).expect("counted key") -= 1;
                touched.insert(k);
            }
            if let Some(k) = new {
                *self.count.entry(k).or_default() += 1;
                touched.insert(k);
                candidates.extend(graph.incident(x).map(|e| e.id));
            }
            self.key_of[x] = new;
        }
        candidates.sort_unstable();
        candidates.dedup();

        let mut deletes = Vec::new();
        let mut inserts = Vec::new();
        for id in candidates {
            let new = graph.edge(id).and_then(|e| {
                let (ka, kb) = (self.key_of[e.u]?, self.key_of[e.v]?);
                (ka != kb).then(|| ordered(ka, kb))
            });
            let old = self.image.get(&id).copied();
            if old != new {
                if let Some(o) = old {
                    deletes.push((id, o));
                }
                if let Some(n) = new {
                    inserts.push((id, n));
                }
            }
        }

        let mut delta = RecourseDelta { level: level + 1, reset: false, ops: Vec::new() };
        for (id, _) in deletes {
            let e = self.contracted.delete_edge_by_id(id)?;
            self.image.remove(&id);
            delta.ops.push(DeltaOp::DeleteEdge { id, u: e.u, v: e.v });
        }
        let mut added = Vec::new();
        for k in touched {
            let live = self.count.get(&k).copied().unwrap_or(0) > 0;
            match (live, self.super_of_key.get(&k).copied()) {
                (false, Some(s)) => {
                    self.super_of_key.remove(&k);
                    self.count.remove(&k);
                    self.contracted.remove_vertex(s)?;
                    delta.ops.push(DeltaOp::RemoveVertex { v: s });
                }
                (false, None) => {
                    self.count.remove(&k);
                }
                (true, None) => added.push(k),
                (true, Some(_)) => {}
            }
        }
        for k in added {
            let s = self.contracted.add_vertex();
            self.super_of_key.insert(k, s);
            delta.ops.push(DeltaOp::AddVertex { v: s });
        }
        for (id, (ka, kb)) in inserts {
            let (u, v) = (self.super_of_key[&ka], self.super_of_key[&kb]);
            self.contracted.insert_edge_with_id(u, v, id)?;
            self.image.insert(id, (ka, kb));
            delta.ops.push(DeltaOp::InsertEdge { id, u, v });
        }
        Ok(delta)
    }

    pub fn root(&self) -> &EdState {
        &self.root
    }

    /// `G^{i+1}`.
    pub fn contracted(&self) -> &DynGraph {
        &self.contracted
    }

    /// The supervertex of `v` in the contracted graph.
    pub fn super_of(&self, v: VertexId) -> Option<VertexId> {
        let k = (*self.key_of.get(v)?)?;
        self.super_of_key.get(&k).copied()
    }

    /// Maintained clusters paired with their supervertex, by supervertex id.
    pub fn clusters(&self) -> Vec<(VertexId, Cluster)> {
        let mut out: Vec<(VertexId, Cluster)> =
            self.root.clusters().into_iter().map(|(k, c)| (self.super_of_key[&k], c)).collect();
        out.sort_by_key(|(s, _)| *s);
        out
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
}

/// Expander hierarchy of a dynamic graph, one `DynamicEd` per level.
#[derive(Clone, Debug)]
pub struct DynHierarchy {
    base: DynGraph,
    levels: Vec<DynamicEd>,
    params: DynParams,
    counters: Counters,
}

impl DynHierarchy {
    pub fn new(graph: DynGraph, params: DynParams) -> Result<Self> {
        params.validate()?;
        let mut h = Self { base: graph, levels: Vec::new(), params, counters: Counters::default() };
        h.extend()?;
        Ok(h)
    }

    /// Adds levels until the top graph is edgeless.
    fn extend(&mut self) -> Result<Vec<RecourseDelta>> {
        let mut deltas = Vec::new();
        loop {
            let i = self.levels.len();
            let g = if i == 0 { &self.base } else { &self.levels[i - 1].contracted };
            if g.num_edges() == 0 {
                return Ok(deltas);
            }
            if i >= self.params.depth_cap {
                return Err(Error::DepthCap(self.params.depth_cap));
            }
            let lvl = DynamicEd::build(g, &self.params, &mut self.counters)?;
            deltas.push(RecourseDelta::replacement(i + 1, None, Some(&lvl.contracted)));
            self.levels.push(lvl);
        }
    }

    /// Applies an edge update to `G^0` and propagates contracted-graph changes
    /// level by level. Returns the delta applied to each `G^{i+1}`.
    pub fn apply(&mut self, op: EdgeOp, u: VertexId, v: VertexId) -> Result<Vec<RecourseDelta>> {
        let id = self.base.apply_edge_update(op, u, v)?;
        self.counters.stats.updates += 1;
        let mut ops = vec![LevelOp::Edge(op, u, v, id)];
        let mut deltas = Vec::new();
        let mut i = 0;
        while i < self.levels.len() && !ops.is_empty() {
            let (lower, upper) = self.levels.split_at_mut(i);
            let g = if i == 0 { &self.base } else { &lower[i - 1].contracted };
            let out = upper[0].apply(g, &self.params, &mut self.counters, &ops, i)?;
            ops = out.iter().flat_map(level_ops).collect();
            deltas.extend(out);
            i += 1;
        }
        deltas.extend(self.extend()?);
        let total: u64 = deltas.iter().map(|d| d.len() as u64).sum();
        self.counters.stats.recourse_total += total;
        self.counters.stats.recourse_max = self.counters.stats.recourse_max.max(total);
        Ok(deltas)
    }

    pub fn base(&self) -> &DynGraph {
        &self.base
    }

    pub fn params(&self) -> &DynParams {
        &self.params
    }

    /// Number of levels `t`; `G^t` is edgeless.
    pub fn depth(&self) -> usize {
        (0..=self.levels.len()).find(|&j| self.graph(j).num_edges() == 0).unwrap_or(self.levels.len())
    }

    /// Levels kept up to date, including dormant ones above `depth()` whose
    /// graphs are edgeless and whose clusters are singletons.
    pub fn maintained(&self) -> usize {
        self.levels.len()
    }

    pub fn graph(&self, i: usize) -> &DynGraph {
        if i == 0 {
            &self.base
        } else {
            &self.levels[i - 1].contracted
        }
    }

    pub fn level(&self, i: usize) -> &DynamicEd {
        &self.levels[i]
    }

    pub fn stats(&self) -> &DynStats {
        &self.counters.stats
    }

    pub fn level_stats(&self) -> Vec<LevelStats> {
        (0..=self.depth())
            .map(|i| {
                let g = self.graph(i);
                let lvl = self.levels.get(i);
                LevelStats {
                    level: i,
                    vertices: g.num_vertices(),
                    edges: g.num_edges(),
                    volume: g.total_volume(),
                    clusters: lvl.map_or(g.num_vertices(), |l| l.contracted.num_vertices()),
                    updates: lvl.map_or(0, |l| l.updates),
                    budget: lvl.map_or(0, |l| l.budget),
                }
            })
            .collect()
    }

    /// `(level, vertex)` pairs from the leaf `v` up to its root.
    pub fn path(&self, v: VertexId) -> Result<Vec<(usize, VertexId)>> {
        if !self.base.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        let mut path = vec![(0, v)];
        let mut x = v;
        for (i, l) in self.levels[..self.depth()].iter().enumerate() {
            x = l.super_of(x).ok_or_else(|| Error::Consistency(format!("level {i} vertex {x} has no parent")))?;
            path.push((i + 1, x));
        }
        Ok(path)
    }

    pub fn connected(&self, u: VertexId, v: VertexId) -> Result<bool> {
        let (pu, pv) = (self.path(u)?, self.path(v)?);
        Ok(pu.last() == pv.last())
    }

    /// A static copy of the current hierarchy.
    pub fn snapshot(&self) -> Hierarchy {
        let mut levels = Vec::new();
        for (i, l) in self.levels[..self.depth()].iter().enumerate() {
            let g = self.graph(i);
            let clusters: Vec<Cluster> = l.clusters().into_iter().map(|(_, c)| c).collect();
            let constants = self.params.decomp.constants(g.total_volume());
            let alpha_bound_ok = to_f64(self.params.alpha()) <= 1.0 / (4.0 * constants.gamma_cmp as f64 * constants.log_m());
            let decomposition = Decomposition {
                parent: g.vertices().collect(),
                clusters,
                alpha: self.params.alpha(),
                phi: self.params.phi(),
                constants,
                rounds: 0,
                alpha_bound_ok,
                w_clamps: 0,
            };
            let parent_of = (0..g.vertex_bound()).map(|v| if g.contains_vertex(v) { l.super_of(v) } else { None }).collect();
            levels.push(HierLevel { graph: g.clone(), decomposition, parent_of });
        }
        Hierarchy { levels, top: self.graph(self.depth()).clone(), alpha: self.params.alpha(), phi: self.params.phi() }
    }

    /// Contract consistency, laminarity and small-cluster expansion at every level.
    pub fn check(&self, exhaustive_limit: usize) -> VerificationReport {
        let mut r = VerificationReport::default();
        for (i, l) in self.levels.iter().enumerate() {
            let g = self.graph(i);
            let clusters = l.clusters();
            let parts: Vec<Vec<VertexId>> = clusters.iter().map(|(_, c)| c.members.clone()).collect();
            let name = |s: &str| format!("level{i}.{s}");
            match contract(g, &parts) {
                Err(e) => r.push(name("partition"), false, 0.0, 0.0, Some(serde_json::json!(e.to_string()))),
                Ok(c) => {
                    let supers: Vec<VertexId> = clusters.iter().map(|(s, _)| *s).collect();
                    let mut bad = None;
                    if c.graph.num_edges() != l.contracted.num_edges() || supers.len() != l.contracted.num_vertices() {
                        bad = Some(serde_json::json!({
                            "expected_edges": c.graph.num_edges(),
                            "maintained_edges": l.contracted.num_edges(),
                            "expected_vertices": supers.len(),
                            "maintained_vertices": l.contracted.num_vertices(),
                        }));
                    }
                    for e in c.graph.sorted_edges() {
                        if bad.is_some() {
                            break;
                        }
                        let want = ordered(supers[e.u] as u64, supers[e.v] as u64);
                        let got = l.contracted.edge(e.id).map(|f| ordered(f.u as u64, f.v as u64));
                        if got != Some(want) {
                            bad = Some(serde_json::json!({ "edge": e.id, "expected": want, "maintained": got }));
                        }
                    }
                    r.push(name("contract_consistency"), bad.is_none(), c.graph.num_edges() as f64, 0.0, bad);
                }
            }
            let sets = l.root.process_sets();
            let laminar = laminar_witness(&sets);
            r.push(name("laminar"), laminar.is_none(), sets.len() as f64, 0.0, laminar);
            for (s, c) in &clusters {
                if c.members.len() > exhaustive_limit {
                    continue;
                }
                let w = self.params.alpha() / c.phi;
                match oracle::check_weighted_expander_slack(g, &c.members, w, c.phi, c.slack) {
                    Ok(x) => {
                        let measured = x.conductance.map_or(f64::INFINITY, to_f64);
                        let witness = (!x.holds).then(|| {
                            serde_json::json!({ "supervertex": s, "members": c.members, "cut": x.witness, "phi": fmt_rational(c.phi), "slack": c.slack })
                        });
                        r.push(name("expansion"), x.holds, measured, to_f64(c.phi) / c.slack as f64, witness);
                    }
                    Err(e) => r.push(name("expansion"), false, 0.0, 0.0, Some(serde_json::json!(e.to_string()))),
                }
            }
        }
        r
    }
}

/// `None` when the sets form a laminar family, else two crossing sets.
fn laminar_witness(sets: &[Vec<VertexId>]) -> Option<serde_json::Value> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(sets[i].len()));
    let mut label: HashMap<VertexId, usize> = HashMap::new();
    for &i in &order {
        let mut seen = None;
        for v in &sets[i] {
            let l = label.get(v).copied();
            match seen {
                None => seen = Some(l),
                Some(s) if s != l => {
                    return Some(serde_json::json!({ "set": sets[i], "crosses": l.map(|j| &sets[j]) }));
                }
                _ => {}
            }
        }
        for &v in &sets[i] {
            label.insert(v, i);
        }
    }
    None
}

pub fn hier_apply(h: &mut DynHierarchy, op: EdgeOp, u: VertexId, v: VertexId) -> Result<Vec<RecourseDelta>> {
    h.apply(op, u, v)
}

pub fn hier_path(h: &DynHierarchy, v: VertexId) -> Result<Vec<(usize, VertexId)>> {
    h.path(v)
}

pub fn hier_connected(h: &DynHierarchy, u: VertexId, v: VertexId) -> Result<bool> {
    h.connected(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn components(g: &DynGraph) -> Vec<usize> {
        let mut root: Vec<usize> = (0..g.vertex_bound()).collect();
        fn find(r: &mut Vec<usize>, x: usize) -> usize {
            let mut x = x;
            while r[x] != x {
                r[x] = r[r[x]];
                x = r[x];
            }
            x
        }
        for e in g.edges() {
            let (a, b) = (find(&mut root, e.u), find(&mut root, e.v));
            root[a] = b;
        }
        (0..g.vertex_bound()).map(|v| find(&mut root, v)).collect()
    }

    fn bridge_pair() -> DynGraph {
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

    #[test]
    fn deleting_the_bridge_splits_the_root() {
        let mut h = DynHierarchy::new(bridge_pair(), DynParams::default()).unwrap();
        assert!(h.connected(0, 9).unwrap());
        h.apply(EdgeOp::Delete, 4, 5).unwrap();
        assert!(!h.connected(0, 9).unwrap());
        assert!(h.connected(0, 4).unwrap());
        assert!(h.check(16).passed(), "{}", h.check(16).to_json());
        h.apply(EdgeOp::Insert, 4, 5).unwrap();
        assert!(h.connected(0, 9).unwrap());
    }

    #[test]
    fn same_vertex_is_connected_and_unknown_errors() {
        let h = DynHierarchy::new(DynGraph::with_vertices(3), DynParams::default()).unwrap();
        assert_eq!(h.depth(), 0);
        assert!(h.connected(1, 1).unwrap());
        assert!(!h.connected(0, 1).unwrap());
        assert_eq!(h.path(7), Err(Error::UnknownVertex(7)));
    }

    fn random_run(params: DynParams, seed: u64, steps: usize) {
        let n = 24;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for _ in 0..40 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            edges.push((a, b));
        }
        let g = DynGraph::from_edges(n, &edges).unwrap();
        let mut h = DynHierarchy::new(g, params).unwrap();
        for step in 0..steps {
            let live: Vec<_> = h.base().edges().collect();
            if !live.is_empty() && rng.gen_bool(0.5) {
                let e = live[rng.gen_range(0..live.len())];
                h.apply(EdgeOp::Delete, e.u, e.v).unwrap()
            } else {
                h.apply(EdgeOp::Insert, rng.gen_range(0..n), rng.gen_range(0..n)).unwrap()
            };
            let comp = components(h.base());
            for a in 0..n {
                for b in [0, n / 2, n - 1] {
                    assert_eq!(h.connected(a, b).unwrap(), comp[a] == comp[b], "step {step}");
                }
            }
            let r = h.check(12);
            assert!(r.passed(), "step {step}: {}", r.to_json());
        }
    }

    #[test]
    fn random_updates_stay_consistent() {
        random_run(DynParams::default(), 1, 150);
    }

    #[test]
    fn pruning_absorbs_updates_on_a_dense_cluster() {
        let n = 16;
        let mut edges = Vec::new();
        for _ in 0..20 {
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
        }
        let mut p = DynParams::new(ratio(1, 64), ratio(1, 16));
        p.rho_override = Some(0.5);
        p.budget_scale = 100.0;
        let mut h = DynHierarchy::new(DynGraph::from_edges(n, &edges).unwrap(), p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for step in 0..60 {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if rng.gen_bool(0.5) && h.base().multiplicity(a, b) > 0 {
                h.apply(EdgeOp::Delete, a, b).unwrap();
            } else {
                h.apply(EdgeOp::Insert, a, b).unwrap();
            }
            let r = h.check(16);
            assert!(r.passed(), "step {step}: {}", r.to_json());
        }
        let s = h.stats();
        assert!(s.restarts < s.updates, "{s:?}");
        assert!(s.pruner_expiries + s.expiries > 0, "{s:?}");
    }

    #[test]
    fn deltas_replay_to_the_maintained_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20;
        let edges: Vec<_> = (0..35).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let mut p = DynParams::default();
        p.rho_override = Some(1.0);
        p.budget_scale = 4.0;
        let mut h = DynHierarchy::new(DynGraph::from_edges(n, &edges).unwrap(), p).unwrap();
        let mut mirror: Vec<DynGraph> = (1..=h.maintained()).map(|i| h.graph(i).clone()).collect();
        for _ in 0..200 {
            let live: Vec<_> = h.base().edges().collect();
            let deltas = if rng.gen_bool(0.5) && !live.is_empty() {
                let e = live[rng.gen_range(0..live.len())];
                h.apply(EdgeOp::Delete, e.u, e.v).unwrap()
            } else {
                h.apply(EdgeOp::Insert, rng.gen_range(0..n), rng.gen_range(0..n)).unwrap()
            };
            for d in &deltas {
                while mirror.len() < d.level {
                    mirror.push(DynGraph::new());
                }
                d.replay(&mut mirror[d.level - 1]).unwrap();
            }
            assert_eq!(mirror.len(), h.maintained());
            for (i, m) in mirror.iter().enumerate() {
                let want: Vec<_> = h.graph(i + 1).sorted_edges();
                assert_eq!(m.sorted_edges(), want);
                assert_eq!(m.num_vertices(), h.graph(i + 1).num_vertices());
            }
        }
    }
}
