//! Dynamic multigraph storage, weighted induced views and partition contraction.
//!
//! Degrees follow the convention that a self-loop contributes exactly 1 to the
//! degree of its vertex. Every edge carries an origin id which survives
//! contraction, so an edge of a contracted graph can always be traced back to
//! the input edge it came from.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ceil_u64, Rational};

pub type VertexId = usize;
pub type EdgeId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub id: EdgeId,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeOp {
    Insert,
    Delete,
}

#[derive(Clone, Debug)]
struct Slot {
    edge: Edge,
    // positions inside adj[u] and adj[v]; pos[1] unused for loops
    pos: [usize; 2],
}

/// Mutable unweighted multigraph with parallel edges and self-loops.
#[derive(Clone, Debug, Default)]
pub struct DynGraph {
    alive: Vec<bool>,
    free: Vec<VertexId>,
    adj: Vec<Vec<EdgeId>>,
    degree: Vec<u64>,
    slots: HashMap<EdgeId, Slot>,
    pairs: HashMap<(VertexId, VertexId), Vec<EdgeId>>,
    next_id: EdgeId,
    n_alive: usize,
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl DynGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Builds a graph from an edge list, assigning ids in list order.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.n_alive += 1;
        if let Some(v) = self.free.pop() {
            self.alive[v] = true;
            return v;
        }
        self.alive.push(true);
        self.adj.push(Vec::new());
        self.degree.push(0);
        self.alive.len() - 1
    }

    /// Removes an isolated vertex.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        self.check(v)?;
        if !self.adj[v].is_empty() {
            return Err(Error::VertexNotIsolated(v));
        }
        self.alive[v] = false;
        self.free.push(v);
        self.n_alive -= 1;
        Ok(())
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if self.contains_vertex(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// One past the largest vertex id ever allocated.
    pub fn vertex_bound(&self) -> usize {
        self.alive.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.n_alive
    }

    pub fn num_edges(&self) -> usize {
        self.slots.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn degree(&self, v: VertexId) -> u64 {
        self.degree.get(v).copied().unwrap_or(0)
    }

    pub fn volume<I: IntoIterator<Item = VertexId>>(&self, set: I) -> u64 {
        set.into_iter().map(|v| self.degree(v)).sum()
    }

    pub fn total_volume(&self) -> u64 {
        self.vertices().map(|v| self.degree(v)).sum()
    }

    pub fn next_edge_id(&self) -> EdgeId {
        self.next_id
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        let id = self.next_id;
        self.insert_edge_with_id(u, v, id)?;
        Ok(id)
    }

    pub fn insert_edge_with_id(&mut self, u: VertexId, v: VertexId, id: EdgeId) -> Result<()> {
        self.check(u)?;
        self.check(v)?;
        if self.slots.contains_key(&id) {
            return Err(Error::DuplicateEdgeId(id));
        }
        let (a, b) = key(u, v);
        let edge = Edge { u: a, v: b, id };
        let pa = self.adj[a].len();
        self.adj[a].push(id);
        self.degree[a] += 1;
        let pb = if a != b {
            let p = self.adj[b].len();
            self.adj[b].push(id);
            self.degree[b] += 1;
            p
        } else {
            usize::MAX
        };
        self.slots.insert(id, Slot { edge, pos: [pa, pb] });
        self.pairs.entry((a, b)).or_default().push(id);
        self.next_id = self.next_id.max(id + 1);
        Ok(())
    }

    /// Deletes one copy of `(u, v)`; returns the id of the removed copy.
    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        self.check(u)?;
        self.check(v)?;
        let id = self
            .pairs
            .get(&key(u, v))
            .and_then(|ids| ids.last().copied())
            .ok_or(Error::MissingEdge(u, v))?;
        self.delete_edge_by_id(id)?;
        Ok(id)
    }

    pub fn delete_edge_by_id(&mut self, id: EdgeId) -> Result<Edge> {
        let slot = self.slots.remove(&id).ok_or(Error::MissingEdgeId(id))?;
        let e = slot.edge;
        self.detach(e.u, slot.pos[0]);
        if !e.is_loop() {
            self.detach(e.v, slot.pos[1]);
        }
        let ids = self.pairs.get_mut(&(e.u, e.v)).expect("pair index out of sync");
        let at = ids.iter().rposition(|&x| x == id).expect("pair index out of sync");
        ids.swap_remove(at);
        if ids.is_empty() {
            self.pairs.remove(&(e.u, e.v));
        }
        Ok(e)
    }

    fn detach(&mut self, x: VertexId, pos: usize) {
        self.adj[x].swap_remove(pos);
        self.degree[x] -= 1;
        if pos < self.adj[x].len() {
            let moved = self.adj[x][pos];
            let slot = self.slots.get_mut(&moved).expect("adjacency out of sync");
            if slot.edge.u == x {
                slot.pos[0] = pos;
            } else {
                slot.pos[1] = pos;
            }
        }
    }

    pub fn apply_edge_update(&mut self, op: EdgeOp, u: VertexId, v: VertexId) -> Result<EdgeId> {
        match op {
            EdgeOp::Insert => self.insert_edge(u, v),
            EdgeOp::Delete => self.delete_edge(u, v),
        }
    }

    pub fn edge(&self, id: EdgeId) -> Option<Edge> {
        self.slots.get(&id).map(|s| s.edge)
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.pairs.get(&key(u, v)).map_or(0, Vec::len)
    }

    /// Edges incident to `v`; a self-loop is reported once.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .get(v)
            .into_iter()
            .flatten()
            .map(move |id| self.slots[id].edge)
    }

    /// All edges, each reported once, in a deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices()
            .flat_map(move |v| self.incident(v).filter(move |e| e.u == v))
    }

    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut es: Vec<Edge> = self.edges().collect();
        es.sort_by_key(|e| e.id);
        es
    }

    /// Membership mask sized to the vertex id space.
    pub fn mask<'a, I: IntoIterator<Item = &'a VertexId>>(&self, set: I) -> Vec<bool> {
        let mut m = vec![false; self.vertex_bound()];
        for &v in set {
            if v < m.len() {
                m[v] = true;
            }
        }
        m
    }

    pub fn membership(&self, set: &[VertexId]) -> Membership {
        Membership::new(self.vertex_bound(), set)
    }

    /// `out_G(S) = |E(S, V \ S)|`.
    pub fn out(&self, set: &[VertexId]) -> u64 {
        let m = self.membership(set);
        set.iter().map(|&v| self.border(v, &m)).sum()
    }

    /// `border_{G,S}(v)`: edges from `v` leaving `S`.
    pub fn border(&self, v: VertexId, set: &Membership) -> u64 {
        self.incident(v).filter(|e| !set.contains(e.other(v))).count() as u64
    }

    /// `|E(A, B)|` for disjoint sets.
    pub fn edges_between(&self, a: &[VertexId], b: &[VertexId]) -> u64 {
        let mb = self.membership(b);
        a.iter()
            .map(|&v| self.incident(v).filter(|e| !e.is_loop() && mb.contains(e.other(v))).count() as u64)
            .sum()
    }

    pub fn weighted_view(&self, set: &[VertexId], w: Rational) -> Result<WeightedView<'_>> {
        WeightedView::new(self, set, w)
    }

    /// Parses the `n m` + `u v` lines text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_fields(hl, header, 2)?;
        let (n, m) = (nums[0], nums[1]);
        let mut g = Self::with_vertices(n);
        let mut count = 0;
        for (ln, line) in lines {
            let f = parse_fields(ln, line, 2)?;
            if f[0] >= n || f[1] >= n {
                return Err(Error::Parse { line: ln, msg: format!("vertex out of range in {line:?}") });
            }
            g.insert_edge(f[0], f[1]).expect("vertices checked");
            count += 1;
        }
        if count != m {
            return Err(Error::Parse { line: 1, msg: format!("header announces {m} edges, found {count}") });
        }
        Ok(g)
    }

    /// Serializes vertices `0..n` (which must all be alive) in the text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.vertex_bound(), self.num_edges());
        for e in self.sorted_edges() {
            let _ = writeln!(s, "{} {}", e.u, e.v);
        }
        s
    }
}

fn parse_fields(line: usize, text: &str, want: usize) -> Result<Vec<usize>> {
    let f: Vec<&str> = text.split_whitespace().collect();
    if f.len() != want {
        return Err(Error::Parse { line, msg: format!("expected {want} fields, got {text:?}") });
    }
    f.iter()
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Error::Parse { line, msg: format!("not a vertex id: {x:?}") })
        })
        .collect()
}

/// Vertex-set membership; hashed when the set is small against the id space.
#[derive(Clone, Debug)]
pub enum Membership {
    Dense(Vec<bool>),
    Sparse(HashSet<VertexId>),
}

impl Membership {
    pub fn new(bound: usize, set: &[VertexId]) -> Self {
        if set.len() * 16 >= bound {
            let mut m = vec![false; bound];
            for &v in set {
                if v < bound {
                    m[v] = true;
                }
            }
            Membership::Dense(m)
        } else {
            Membership::Sparse(set.iter().copied().collect())
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        match self {
            Membership::Dense(m) => v < m.len() && m[v],
            Membership::Sparse(s) => s.contains(&v),
        }
    }
}

/// The graph `G[S]^w`: the induced subgraph on `S` plus `⌈w⌉` self-loops per
/// boundary edge at its endpoint inside `S`.
#[derive(Clone, Debug)]
pub struct WeightedView<'g> {
    graph: &'g DynGraph,
    members: Vec<VertexId>,
    mask: Membership,
    w: Rational,
    loops_per_border: u64,
}

impl<'g> WeightedView<'g> {
    pub fn new(graph: &'g DynGraph, set: &[VertexId], w: Rational) -> Result<Self> {
        if w < Rational::from_integer(0) {
            return Err(Error::Parameter("negative view weight".into()));
        }
        for &v in set {
            graph.check(v)?;
        }
        let mut members = set.to_vec();
        members.sort_unstable();
        members.dedup();
        let mask = graph.membership(&members);
        Ok(Self { graph, members, mask, w, loops_per_border: ceil_u64(w) })
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn weight(&self) -> Rational {
        self.w
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask.contains(v)
    }

    pub fn border(&self, v: VertexId) -> u64 {
        self.graph.border(v, &self.mask)
    }

    pub fn degree(&self, v: VertexId) -> u64 {
        let mut internal = 0;
        let mut border = 0;
        for e in self.graph.incident(v) {
            if self.mask.contains(e.other(v)) {
                internal += 1;
            } else {
                border += 1;
            }
        }
        internal + self.loops_per_border * border
    }

    pub fn volume(&self) -> u64 {
        self.members.iter().map(|&v| self.degree(v)).sum()
    }

    /// Compact local copy with dense indices, used by the flow and cut routines.
    pub fn materialize(&self) -> ViewGraph {
        let index: HashMap<VertexId, u32> =
            self.members.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let n = self.members.len();
        let mut edges = Vec::new();
        let mut edge_ids = Vec::new();
        let mut loops = vec![0u64; n];
        let mut border = vec![0u64; n];
        for (i, &v) in self.members.iter().enumerate() {
            for e in self.graph.incident(v) {
                let o = e.other(v);
                if e.is_loop() {
                    loops[i] += 1;
                } else if let Some(&j) = index.get(&o) {
                    if (i as u32) < j {
                        edges.push((i as u32, j));
                        edge_ids.push(e.id);
                    }
                } else {
                    border[i] += 1;
                }
            }
        }
        for i in 0..n {
            loops[i] += self.loops_per_border * border[i];
        }
        ViewGraph::build(self.members.clone(), edges, edge_ids, loops, border)
    }
}

/// Static compact multigraph with per-vertex self-loop counts.
#[derive(Clone, Debug)]
pub struct ViewGraph {
    vertices: Vec<VertexId>,
    edges: Vec<(u32, u32)>,
    edge_ids: Vec<EdgeId>,
    loops: Vec<u64>,
    border: Vec<u64>,
    adj: Vec<Vec<(u32, u32)>>,
    degree: Vec<u64>,
}

impl ViewGraph {
    fn build(
        vertices: Vec<VertexId>,
        edges: Vec<(u32, u32)>,
        edge_ids: Vec<EdgeId>,
        loops: Vec<u64>,
        border: Vec<u64>,
    ) -> Self {
        let n = vertices.len();
        let mut adj = vec![Vec::new(); n];
        let mut degree = loops.clone();
        for (k, &(a, b)) in edges.iter().enumerate() {
            adj[a as usize].push((b, k as u32));
            adj[b as usize].push((a, k as u32));
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        Self { vertices, edges, edge_ids, loops, border, adj, degree }
    }

    /// A standalone view over local vertices `0..n`.
    pub fn from_parts(n: usize, edges: &[(usize, usize)], loops: &[u64]) -> Self {
        let mut e = Vec::new();
        let mut l = if loops.is_empty() { vec![0; n] } else { loops.to_vec() };
        for &(a, b) in edges {
            if a == b {
                l[a] += 1;
            } else {
                e.push((a as u32, b as u32));
            }
        }
        let ids = (0..e.len() as u64).collect();
        Self::build((0..n).collect(), e, ids, l, vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn global(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    pub fn globals(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Local index of a global vertex (vertices are kept sorted).
    pub fn local(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_id(&self, k: usize) -> EdgeId {
        self.edge_ids[k]
    }

    pub fn loops(&self, i: usize) -> u64 {
        self.loops[i]
    }

    /// Boundary edges of the underlying set in the base graph.
    pub fn base_border(&self, i: usize) -> u64 {
        self.border[i]
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.degree[i]
    }

    pub fn adj(&self, i: usize) -> &[(u32, u32)] {
        &self.adj[i]
    }

    pub fn volume(&self) -> u64 {
        self.degree.iter().sum()
    }

    pub fn volume_of(&self, side: &[bool]) -> u64 {
        side.iter().zip(&self.degree).filter(|(s, _)| **s).map(|(_, d)| d).sum()
    }

    pub fn cut(&self, side: &[bool]) -> u64 {
        self.edges.iter().filter(|&&(a, b)| side[a as usize] != side[b as usize]).count() as u64
    }

    /// Conductance of the cut `(side, !side)`; a cut with no crossing edges
    /// has conductance 0 even when one side has zero volume.
    pub fn conductance(&self, side: &[bool]) -> (u64, u64) {
        let cut = self.cut(side);
        let vs = self.volume_of(side);
        let vo = self.volume() - vs;
        (cut, vs.min(vo))
    }

    /// `H[A]^w` for local subset `keep`: edges to dropped vertices become
    /// `loops_per_cut_edge` self-loops; existing self-loops are kept.
    pub fn restrict(&self, keep: &[bool], loops_per_cut_edge: u64) -> ViewGraph {
        let mut map = vec![u32::MAX; self.n()];
        let mut verts = Vec::new();
        for i in 0..self.n() {
            if keep[i] {
                map[i] = verts.len() as u32;
                verts.push(i);
            }
        }
        let mut edges = Vec::new();
        let mut ids = Vec::new();
        let mut loops: Vec<u64> = verts.iter().map(|&i| self.loops[i]).collect();
        let mut border: Vec<u64> = verts.iter().map(|&i| self.border[i]).collect();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let (ka, kb) = (keep[a as usize], keep[b as usize]);
            match (ka, kb) {
                (true, true) => {
                    edges.push((map[a as usize], map[b as usize]));
                    ids.push(self.edge_ids[k]);
                }
                (true, false) => {
                    loops[map[a as usize] as usize] += loops_per_cut_edge;
                    border[map[a as usize] as usize] += 1;
                }
                (false, true) => {
                    loops[map[b as usize] as usize] += loops_per_cut_edge;
                    border[map[b as usize] as usize] += 1;
                }
                _ => {}
            }
        }
        let globals = verts.iter().map(|&i| self.vertices[i]).collect();
        ViewGraph::build(globals, edges, ids, loops, border)
    }

    /// Connected components as local index lists, in order of smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = Vec::new();
            while let Some(x) = stack.pop() {
                members.push(x);
                for &(y, _) in &self.adj[x] {
                    if comp[y as usize] == usize::MAX {
                        comp[y as usize] = id;
                        stack.push(y as usize);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// The contracted graph `G_U` plus the vertex → supervertex map.
#[derive(Clone, Debug)]
pub struct ContractedGraph {
    pub graph: DynGraph,
    /// `part_of[v]` is the supervertex of `v` (the index of its part).
    pub part_of: Vec<Option<VertexId>>,
}

/// Contracts each part to a supervertex, dropping intra-part edges and keeping
/// parallel inter-part edges with their origin ids.
pub fn contract(graph: &DynGraph, partition: &[Vec<VertexId>]) -> Result<ContractedGraph> {
    let mut part_of = vec![None; graph.vertex_bound()];
    for (p, part) in partition.iter().enumerate() {
        for &v in part {
            graph.check(v)?;
            if part_of[v].is_some() {
                return Err(Error::InvalidPartition(format!("vertex {v} in two parts")));
            }
            part_of[v] = Some(p);
        }
    }
    if let Some(v) = graph.vertices().find(|&v| part_of[v].is_none()) {
        return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
    }
    let mut h = DynGraph::with_vertices(partition.len());
    for e in graph.sorted_edges() {
        let (a, b) = (part_of[e.u].unwrap(), part_of[e.v].unwrap());
        if a != b {
            h.insert_edge_with_id(a, b, e.id)?;
        }
    }
    Ok(ContractedGraph { graph: h, part_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn triangle() -> DynGraph {
        DynGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn insert_into_empty_pair() {
        let mut g = DynGraph::with_vertices(2);
        g.apply_edge_update(EdgeOp::Insert, 0, 1).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (1, 1));
    }

    #[test]
    fn self_loop_counts_once() {
        let mut g = DynGraph::with_vertices(1);
        g.insert_edge(0, 0).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.incident(0).count(), 1);
    }

    #[test]
    fn delete_one_parallel_copy() {
        let mut g = DynGraph::from_edges(2, &[(0, 1), (0, 1)]).unwrap();
        g.delete_edge(1, 0).unwrap();
        assert_eq!(g.multiplicity(0, 1), 1);
        assert_eq!((g.degree(0), g.degree(1)), (1, 1));
    }

    #[test]
    fn structured_errors() {
        let mut g = DynGraph::with_vertices(2);
        assert_eq!(g.delete_edge(0, 1), Err(Error::MissingEdge(0, 1)));
        assert_eq!(g.insert_edge(0, 5), Err(Error::UnknownVertex(5)));
        g.insert_edge(0, 1).unwrap();
        assert_eq!(g.remove_vertex(0), Err(Error::VertexNotIsolated(0)));
    }

    #[test]
    fn view_degree_formula() {
        let g = triangle();
        let v = g.weighted_view(&[0, 1], ratio(2, 1)).unwrap();
        assert_eq!(v.degree(0), 3);
        let v0 = g.weighted_view(&[0, 1], ratio(0, 1)).unwrap();
        assert_eq!(v0.degree(0), 1);
        let v1 = g.weighted_view(&[0, 1], ratio(1, 1)).unwrap();
        assert_eq!(v1.degree(0), g.degree(0));
        assert!(g.weighted_view(&[7], ratio(1, 1)).is_err());
    }

    #[test]
    fn materialized_view_matches() {
        let g = DynGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 1)]).unwrap();
        let view = g.weighted_view(&[0, 1, 2], ratio(3, 2)).unwrap();
        let vg = view.materialize();
        for i in 0..vg.n() {
            assert_eq!(vg.degree(i), view.degree(vg.global(i)));
        }
        assert_eq!(vg.volume(), view.volume());
    }

    #[test]
    fn contract_c4() {
        let g = DynGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = contract(&g, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(c.graph.num_vertices(), 2);
        assert_eq!(c.graph.multiplicity(0, 1), 2);
    }

    #[test]
    fn contract_trivial_partitions() {
        let g = DynGraph::from_edges(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        let single = contract(&g, &[vec![0, 1, 2]]).unwrap();
        assert_eq!((single.graph.num_vertices(), single.graph.num_edges()), (1, 0));
        let sing = contract(&g, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(sing.graph.num_edges(), 2);
        assert!(contract(&g, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(contract(&g, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn parse_reports_line() {
        let err = DynGraph::parse("3 1\nx y z\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, msg: "expected 2 fields, got \"x y z\"".into() });
        let g = DynGraph::parse("3 2\n0 1\n1 1\n").unwrap();
        assert_eq!(g.degree(1), 2);
        assert_eq!(DynGraph::parse(&g.to_text()).unwrap().num_edges(), 2);
    }
}
