//! Capacitated trees from expander hierarchies and the queries they answer:
//! vertex sparsifiers, cuts, congestion, sparsest cut, multiway cut, and
//! treewidth bags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::cutmatch::log2m;
use crate::decomp::Hierarchy;
use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::rational::{ratio, to_f64, Rational};

/// Sentinel for an unbounded capacity.
pub const INFINITE: u64 = u64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub level: usize,
    /// Vertex of `G^level` this node stands for.
    pub vertex: VertexId,
    pub parent: Option<usize>,
    /// Capacity of the edge to the parent; 0 for roots.
    pub cap: u64,
    /// Number of leaves in the subtree.
    pub leaves: usize,
}

/// Rooted forest whose leaves are the vertices of `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CapTree {
    pub nodes: Vec<TreeNode>,
    /// Node of each leaf vertex.
    leaf_of: BTreeMap<VertexId, usize>,
}

impl CapTree {
    /// Builds a tree from nodes with parent links; leaf counts are recomputed.
    pub fn from_nodes(mut nodes: Vec<TreeNode>) -> Self {
        for x in &mut nodes {
            x.leaves = 0;
        }
        let leaf_of: BTreeMap<VertexId, usize> =
            nodes.iter().enumerate().filter(|(_, x)| x.level == 0).map(|(i, x)| (x.vertex, i)).collect();
        for &i in leaf_of.values() {
            let mut y = Some(i);
            while let Some(z) = y {
                nodes[z].leaves += 1;
                y = nodes[z].parent;
            }
        }
        Self { nodes, leaf_of }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaf(&self, v: VertexId) -> Result<usize> {
        self.leaf_of.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn leaves(&self) -> impl Iterator<Item = (VertexId, usize)> + '_ {
        self.leaf_of.iter().map(|(&v, &i)| (v, i))
    }

    pub fn num_leaves(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].parent.is_none()).collect()
    }

    pub fn root_of(&self, mut x: usize) -> usize {
        while let Some(p) = self.nodes[x].parent {
            x = p;
        }
        x
    }

    /// Node ids from `x` up to its root.
    pub fn path(&self, x: usize) -> Vec<usize> {
        let mut out = vec![x];
        let mut y = x;
        while let Some(p) = self.nodes[y].parent {
            out.push(p);
            y = p;
        }
        out
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.nodes.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            if let Some(p) = x.parent {
                ch[p].push(i);
            }
        }
        ch
    }

    /// Leaf vertices below `x`.
    pub fn leaves_below(&self, x: usize) -> Vec<VertexId> {
        self.leaf_of.iter().filter(|(_, &i)| self.path(i).contains(&x)).map(|(&v, _)| v).collect()
    }

    /// `node <id> level <i> parent <id|-> cap <c>`, one line per node.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, x) in self.nodes.iter().enumerate() {
            let p = x.parent.map_or("-".to_string(), |p| p.to_string());
            let _ = writeln!(s, "node {i} level {} parent {p} cap {}", x.level, x.cap);
        }
        s
    }

    /// Edges on the tree path between two nodes, as child node ids.
    /// `None` when they lie in different trees.
    fn path_edges(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let (pa, pb) = (self.path(a), self.path(b));
        if pa.last() != pb.last() {
            return None;
        }
        let on_b: BTreeSet<usize> = pb.iter().copied().collect();
        let lca = *pa.iter().find(|x| on_b.contains(x))?;
        let mut out: Vec<usize> = pa.iter().copied().take_while(|&x| x != lca).collect();
        out.extend(pb.iter().copied().take_while(|&x| x != lca));
        Some(out)
    }
}

/// Leaves `(0, v)`; the node `(i, u)` hangs below `(i + 1, parent_of[u])` with
/// capacity `deg_{G^i}(u)`.
pub fn build_cap_tree(h: &Hierarchy) -> CapTree {
    let mut nodes = Vec::new();
    let mut index: Vec<Vec<Option<usize>>> = Vec::new();
    for i in 0..=h.depth() {
        let g = h.graph(i);
        let mut ids = vec![None; g.vertex_bound()];
        for v in g.vertices() {
            ids[v] = Some(nodes.len());
            let cap = if i < h.depth() { g.degree(v) } else { 0 };
            nodes.push(TreeNode { level: i, vertex: v, parent: None, cap, leaves: 0 });
        }
        index.push(ids);
    }
    for (i, lvl) in h.levels.iter().enumerate() {
        for v in lvl.graph.vertices() {
            let me = index[i][v].expect("indexed vertex");
            nodes[me].parent = lvl.parent_of[v].and_then(|p| index[i + 1][p]);
        }
    }
    CapTree::from_nodes(nodes)
}

/// The union of the leaf-to-root paths of `terminals`, capacities inherited.
pub fn vertex_sparsifier(t: &CapTree, terminals: &[VertexId]) -> Result<CapTree> {
    if terminals.is_empty() {
        return Err(Error::Query("empty terminal set".into()));
    }
    let mut keep = BTreeSet::new();
    for &v in terminals {
        keep.extend(t.path(t.leaf(v)?));
    }
    let keep: Vec<usize> = keep.into_iter().collect();
    let nodes = keep
        .iter()
        .map(|&i| {
            let x = &t.nodes[i];
            let parent = x.parent.map(|p| keep.binary_search(&p).expect("path closed upward"));
            TreeNode { parent, ..x.clone() }
        })
        .collect();
    Ok(CapTree::from_nodes(nodes))
}

/// Minimum capacity on the tree path between two leaves: `INFINITE` when
/// `s = u`, 0 when they lie in different trees.
pub fn st_cut_estimate(t: &CapTree, s: VertexId, u: VertexId) -> Result<u64> {
    let (a, b) = (t.leaf(s)?, t.leaf(u)?);
    if a == b {
        return Ok(INFINITE);
    }
    Ok(match t.path_edges(a, b) {
        None => 0,
        Some(es) => es.iter().map(|&x| t.nodes[x].cap).min().unwrap_or(INFINITE),
    })
}

/// Exact minimum cut in the tree separating leaf sets `a` and `b`.
pub fn tree_mincut_sets(t: &CapTree, a: &[VertexId], b: &[VertexId]) -> Result<u64> {
    #[derive(Clone, Copy, PartialEq)]
    enum Side {
        Free,
        A,
        B,
    }
    let mut side = vec![Side::Free; t.len()];
    for &v in a {
        side[t.leaf(v)?] = Side::A;
    }
    for &v in b {
        let x = t.leaf(v)?;
        if side[x] == Side::A {
            return Err(Error::Query(format!("vertex {v} on both sides")));
        }
        side[x] = Side::B;
    }
    // cost with the node's component free of B (ka) or free of A (kb)
    let mut ka = vec![0u64; t.len()];
    let mut kb = vec![0u64; t.len()];
    for x in post_order(t) {
        match side[x] {
            Side::A => kb[x] = INFINITE,
            Side::B => ka[x] = INFINITE,
            Side::Free => {}
        }
    }
    let ch = t.children();
    for x in post_order(t) {
        for &c in &ch[x] {
            let w = t.nodes[c].cap;
            ka[x] = ka[x].saturating_add(ka[c].min(kb[c].saturating_add(w)));
            kb[x] = kb[x].saturating_add(kb[c].min(ka[c].saturating_add(w)));
        }
    }
    Ok(t.roots().iter().map(|&r| ka[r].min(kb[r])).fold(0u64, |acc, v| acc.saturating_add(v)))
}

/// Children before parents.
fn post_order(t: &CapTree) -> Vec<usize> {
    let ch = t.children();
    let mut out = Vec::with_capacity(t.len());
    for r in t.roots() {
        let mut stack = vec![(r, false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                out.push(x);
            } else {
                stack.push((x, true));
                stack.extend(ch[x].iter().map(|&c| (c, false)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DemandSet {
    pub demands: Vec<(VertexId, VertexId, Rational)>,
}

impl DemandSet {
    pub fn push(&mut self, s: VertexId, t: VertexId, amount: Rational) -> Result<()> {
        if amount < ratio(0, 1) {
            return Err(Error::Query(format!("negative demand {amount}")));
        }
        self.demands.push((s, t, amount));
        Ok(())
    }

    pub fn scaled(&self, k: Rational) -> Self {
        Self { demands: self.demands.iter().map(|&(s, t, a)| (s, t, a * k)).collect() }
    }
}

/// Congestion of routing `d` along unique tree paths; `None` stands for an
/// unbounded value (a loaded zero-capacity edge or a demand across trees).
pub fn tree_congestion(t: &CapTree, d: &DemandSet) -> Result<Option<Rational>> {
    let mut load = vec![ratio(0, 1); t.len()];
    for &(s, u, amount) in &d.demands {
        let (a, b) = (t.leaf(s)?, t.leaf(u)?);
        if a == b || amount == ratio(0, 1) {
            continue;
        }
        match t.path_edges(a, b) {
            None => return Ok(None),
            Some(es) => {
                for x in es {
                    load[x] += amount;
                }
            }
        }
    }
    let mut worst = ratio(0, 1);
    for (x, l) in load.iter().enumerate() {
        if *l == ratio(0, 1) {
            continue;
        }
        let cap = t.nodes[x].cap;
        if cap == 0 {
            return Ok(None);
        }
        worst = worst.max(*l / ratio(cap as i64, 1));
    }
    Ok(Some(worst))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeSparsestCut {
    /// The cut tree edge as its child node; `None` for a forest, which has a free cut.
    pub edge: Option<usize>,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub sparsity: Rational,
    /// Leaves on the smaller side.
    pub side: Vec<VertexId>,
}

/// `min_e cap(e) / min(ℓ_e, n − ℓ_e)` over tree edges with both sides nonempty.
pub fn tree_sparsest_cut(t: &CapTree) -> Result<TreeSparsestCut> {
    let n = t.num_leaves();
    if n < 2 {
        return Err(Error::Query("sparsest cut needs at least two leaves".into()));
    }
    let roots = t.roots();
    if roots.len() > 1 {
        let r = roots.iter().copied().min_by_key(|&r| t.nodes[r].leaves).expect("roots");
        return Ok(TreeSparsestCut { edge: None, sparsity: ratio(0, 1), side: t.leaves_below(r) });
    }
    let mut best: Option<(Rational, usize)> = None;
    for (x, node) in t.nodes.iter().enumerate() {
        if node.parent.is_none() {
            continue;
        }
        let small = node.leaves.min(n - node.leaves);
        if small == 0 {
            continue;
        }
        let s = ratio(node.cap as i64, small as i64);
        if best.is_none_or(|(b, _)| s < b) {
            best = Some((s, x));
        }
    }
    let (sparsity, x) = best.ok_or_else(|| Error::Query("no tree edge splits the leaves".into()))?;
    let below = t.leaves_below(x);
    let side = if 2 * below.len() <= n {
        below
    } else {
        let b: BTreeSet<VertexId> = below.into_iter().collect();
        t.leaves().map(|(v, _)| v).filter(|v| !b.contains(v)).collect()
    };
    Ok(TreeSparsestCut { edge: Some(x), sparsity, side })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiwayCut {
    pub value: u64,
    /// Cut tree edges, as child node ids.
    pub edges: Vec<usize>,
}

/// Optimal multiway cut of leaf terminals in the tree.
pub fn tree_multiway_cut(t: &CapTree, terminals: &[VertexId]) -> Result<MultiwayCut> {
    let mut uniq: Vec<VertexId> = terminals.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() < 2 {
        return Err(Error::Query("multiway cut needs at least two terminals".into()));
    }
    let mut is_term = vec![false; t.len()];
    for &v in &uniq {
        is_term[t.leaf(v)?] = true;
    }
    let ch = t.children();
    let order = post_order(t);
    // d0: component of x holds no terminal; d1: exactly one
    let mut d0 = vec![0u64; t.len()];
    let mut d1 = vec![INFINITE; t.len()];
    // per-child choice for d0 and the child carrying the terminal for d1
    let mut cut0: Vec<Vec<bool>> = vec![Vec::new(); t.len()];
    let mut carrier: Vec<Option<usize>> = vec![None; t.len()];
    for &x in &order {
        let mut sum = 0u64;
        let mut choice = Vec::with_capacity(ch[x].len());
        for &c in &ch[x] {
            let w = t.nodes[c].cap;
            let cut = w.saturating_add(d0[c].min(d1[c]));
            let keep = d0[c];
            choice.push(cut < keep);
            sum = sum.saturating_add(cut.min(keep));
        }
        if is_term[x] {
            d0[x] = INFINITE;
            d1[x] = sum;
        } else {
            d0[x] = sum;
            for (k, &c) in ch[x].iter().enumerate() {
                let w = t.nodes[c].cap;
                let own = w.saturating_add(d0[c].min(d1[c])).min(d0[c]);
                let alt = sum.saturating_sub(own).saturating_add(d1[c]);
                if d1[c] != INFINITE && alt < d1[x] {
                    d1[x] = alt;
                    carrier[x] = Some(k);
                }
            }
        }
        cut0[x] = choice;
    }
    let mut edges = Vec::new();
    let mut value = 0u64;
    // (node, state): state 1 means the component already holds a terminal
    let mut stack: Vec<(usize, bool)> = Vec::new();
    for r in t.roots() {
        let one = d1[r] < d0[r];
        value = value.saturating_add(d0[r].min(d1[r]));
        stack.push((r, one));
    }
    while let Some((x, one)) = stack.pop() {
        for (k, &c) in ch[x].iter().enumerate() {
            if one && !is_term[x] && carrier[x] == Some(k) {
                stack.push((c, true));
            } else if cut0[x][k] {
                edges.push(c);
                stack.push((c, d1[c] < d0[c]));
            } else {
                stack.push((c, false));
            }
        }
    }
    edges.sort_unstable();
    Ok(MultiwayCut { value, edges })
}

/// A tree decomposition over the nodes of the capacitated tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeBags {
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<Vec<VertexId>>,
}

impl TreeBags {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    /// `bag <node-id>: v1 v2 …`, one line per node.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, b) in self.bags.iter().enumerate() {
            let _ = write!(s, "bag {i}:");
            for v in b {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Bags over the tree of `build_cap_tree(h)`. A leaf `v` holds `v` and its
/// neighbours; a node for a cluster `U` of `G^{i-1}` holds the original
/// endpoints of every `G^{i-1}` edge touching `U`, inner edges included.
pub fn treewidth_bags(h: &Hierarchy) -> Result<TreeBags> {
    let t = build_cap_tree(h);
    let g0 = h.graph(0);
    let ch = t.children();
    let mut bags = Vec::with_capacity(t.len());
    for (x, node) in t.nodes.iter().enumerate() {
        let mut bag = BTreeSet::new();
        if node.level == 0 {
            bag.insert(node.vertex);
            for e in g0.incident(node.vertex) {
                bag.insert(e.u);
                bag.insert(e.v);
            }
        } else {
            let below = h.graph(node.level - 1);
            for &c in &ch[x] {
                for e in below.incident(t.nodes[c].vertex) {
                    let o = g0.edge(e.id).ok_or(Error::MissingEdgeId(e.id))?;
                    bag.insert(o.u);
                    bag.insert(o.v);
                }
            }
        }
        bags.push(bag.into_iter().collect());
    }
    Ok(TreeBags { parent: t.nodes.iter().map(|x| x.parent).collect(), bags })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "crate::rational::ser_rational")]
    pub phi: Rational,
    /// Slack `s`.
    pub slack: u64,
    /// Depth `t`.
    pub depth: usize,
    pub m: u64,
    pub c_q: f64,
    /// `(c_q s log m)^t · max(1/α, 1/φ) / α^{t−1}`.
    pub value: f64,
    pub empirical_max_ratio: Option<f64>,
}

pub fn quality_value(alpha: Rational, phi: Rational, slack: u64, depth: usize, m: u64, c_q: f64) -> f64 {
    let (a, p) = (to_f64(alpha), to_f64(phi));
    let t = depth as i32;
    (c_q * slack as f64 * log2m(m)).powi(t) * (1.0 / a).max(1.0 / p) / a.powi(t - 1)
}

pub fn quality_report(h: &Hierarchy, c_q: f64, empirical_max_ratio: Option<f64>) -> QualityReport {
    let m = h.graph(0).num_edges() as u64;
    let slack = h.slack();
    QualityReport {
        alpha: h.alpha,
        phi: h.phi,
        slack,
        depth: h.depth(),
        m,
        c_q,
        value: quality_value(h.alpha, h.phi, slack, h.depth(), m, c_q),
        empirical_max_ratio,
    }
}

/// Sum of all edge capacities.
pub fn total_capacity(t: &CapTree) -> u64 {
    t.nodes.iter().map(|x| x.cap).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{build_static_hierarchy, DecompParams};
    use crate::graph::DynGraph;

    fn hier(g: &DynGraph) -> Hierarchy {
        build_static_hierarchy(g, &DecompParams::default(), 1, 32).unwrap()
    }

    fn triangle() -> DynGraph {
        DynGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_is_a_star_of_twos() {
        let t = build_cap_tree(&hier(&triangle()));
        assert_eq!(t.len(), 4);
        assert_eq!(t.roots().len(), 1);
        for v in 0..3 {
            let x = t.leaf(v).unwrap();
            assert_eq!(t.nodes[x].cap, 2);
            assert_eq!(t.nodes[x].parent, Some(3));
        }
        assert_eq!(t.nodes[3].leaves, 3);
        assert_eq!(st_cut_estimate(&t, 0, 1).unwrap(), 2);
        assert_eq!(st_cut_estimate(&t, 2, 2).unwrap(), INFINITE);
        assert!(t.to_text().contains("node 3 level 1 parent - cap 0"));
    }

    #[test]
    fn path_graph_star_caps() {
        let g = DynGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = build_cap_tree(&hier(&g));
        let caps: Vec<u64> = (0..3).map(|v| t.nodes[t.leaf(v).unwrap()].cap).collect();
        assert_eq!(caps, vec![1, 2, 1]);
        assert_eq!(st_cut_estimate(&t, 0, 2).unwrap(), 1);
        let sc = tree_sparsest_cut(&t).unwrap();
        assert_eq!(sc.sparsity, ratio(1, 1));
    }

    #[test]
    fn edgeless_is_a_forest_of_roots() {
        let g = DynGraph::with_vertices(4);
        let t = build_cap_tree(&hier(&g));
        assert_eq!(t.roots().len(), 4);
        assert_eq!(st_cut_estimate(&t, 0, 1).unwrap(), 0);
        assert_eq!(tree_sparsest_cut(&t).unwrap().sparsity, ratio(0, 1));
        let bags = treewidth_bags(&hier(&g)).unwrap();
        assert!(bags.bags.iter().all(|b| b.len() == 1));
        assert!(tree_sparsest_cut(&build_cap_tree(&hier(&DynGraph::with_vertices(1)))).is_err());
    }

    #[test]
    fn congestion_on_the_triangle() {
        let t = build_cap_tree(&hier(&triangle()));
        let mut d = DemandSet::default();
        assert_eq!(tree_congestion(&t, &d).unwrap(), Some(ratio(0, 1)));
        d.push(0, 1, ratio(2, 1)).unwrap();
        assert_eq!(tree_congestion(&t, &d).unwrap(), Some(ratio(1, 1)));
        assert_eq!(tree_congestion(&t, &d.scaled(ratio(2, 1))).unwrap(), Some(ratio(2, 1)));
        assert!(d.push(0, 1, ratio(-1, 1)).is_err());
    }

    #[test]
    fn sparsifier_keeps_terminal_paths() {
        let t = build_cap_tree(&hier(&triangle()));
        let all = vertex_sparsifier(&t, &[0, 1, 2]).unwrap();
        assert_eq!(all.len(), t.len());
        let two = vertex_sparsifier(&t, &[0, 2]).unwrap();
        assert_eq!(two.len(), 3);
        assert_eq!(two.num_leaves(), 2);
        assert!(vertex_sparsifier(&t, &[]).is_err());
        assert!(vertex_sparsifier(&t, &[9]).is_err());
    }

    fn star(caps: &[u64]) -> CapTree {
        let k = caps.len();
        let mut nodes: Vec<TreeNode> =
            caps.iter().enumerate().map(|(v, &c)| TreeNode { level: 0, vertex: v, parent: Some(k), cap: c, leaves: 0 }).collect();
        nodes.push(TreeNode { level: 1, vertex: 0, parent: None, cap: 0, leaves: 0 });
        CapTree::from_nodes(nodes)
    }

    #[test]
    fn multiway_cut_on_a_star() {
        let t = star(&[5, 1, 3, 2, 7]);
        let mw = tree_multiway_cut(&t, &[0, 2, 3, 4]).unwrap();
        // all but the most expensive terminal edge: 2 + 3 + 5
        assert_eq!(mw.value, 10);
        assert_eq!(mw.edges.len(), 3);
        let two = tree_multiway_cut(&t, &[1, 4]).unwrap();
        assert_eq!(two.value, st_cut_estimate(&t, 1, 4).unwrap());
        assert!(tree_multiway_cut(&t, &[1]).is_err());
    }

    #[test]
    fn mincut_sets_on_a_star() {
        let t = star(&[5, 1, 3, 2, 7]);
        assert_eq!(tree_mincut_sets(&t, &[0, 1], &[4]).unwrap(), 6);
        assert_eq!(tree_mincut_sets(&t, &[0], &[4]).unwrap(), 5);
        assert!(tree_mincut_sets(&t, &[0], &[0]).is_err());
    }

    #[test]
    fn triangle_bags() {
        let h = hier(&triangle());
        let b = treewidth_bags(&h).unwrap();
        assert_eq!(b.bags[0], vec![0, 1, 2]);
        assert!(b.to_text().starts_with("bag 0: 0 1 2\n"));
        let r = crate::oracle::verify_tree_decomposition(&triangle(), &b.parent, &b.bags);
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn quality_formula_laws() {
        let (a, p) = (ratio(1, 16), ratio(1, 64));
        let one = quality_value(a, p, 1, 1, 1024, 1.0);
        assert!((one - 10.0 * 64.0).abs() < 1e-9);
        let d = quality_value(a, p, 2, 3, 1024, 1.0) / quality_value(a, p, 1, 3, 1024, 1.0);
        assert!((d - 8.0).abs() < 1e-9);
    }
}
