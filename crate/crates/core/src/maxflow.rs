//! Dinic max-flow on a view graph with per-vertex source and sink capacities
//! and a uniform edge capacity. Used for residual certification and by the
//! matching player; the oracle module deliberately has its own solver.

use std::collections::VecDeque;

use crate::graph::ViewGraph;

pub(crate) struct FlowOutcome {
    pub value: i64,
    /// Signed flow per view edge, positive in the stored `(a, b)` direction.
    pub edge_flow: Vec<i64>,
    /// Flow from the super-source into each vertex.
    pub supplied: Vec<i64>,
    /// Flow from each vertex into the super-sink.
    pub absorbed: Vec<i64>,
    /// Vertices reachable from the super-source in the final residual graph.
    pub source_side: Vec<bool>,
}

struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

struct Dinic {
    g: Vec<Vec<Arc>>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Self { g: (0..n).map(|_| Vec::new()).collect(), level: vec![0; n], it: vec![0; n] }
    }

    fn add(&mut self, a: usize, b: usize, cap_ab: i64, cap_ba: i64) -> (usize, usize) {
        let ia = self.g[a].len();
        let ib = self.g[b].len();
        self.g[a].push(Arc { to: b, cap: cap_ab, rev: ib });
        self.g[b].push(Arc { to: a, cap: cap_ba, rev: ia });
        (a, ia)
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut q = VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(x) = q.pop_front() {
            for a in &self.g[x] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[x] + 1;
                    q.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, x: usize, t: usize, f: i64) -> i64 {
        if x == t {
            return f;
        }
        while self.it[x] < self.g[x].len() {
            let i = self.it[x];
            let (to, cap) = (self.g[x][i].to, self.g[x][i].cap);
            if cap > 0 && self.level[to] == self.level[x] + 1 {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.g[x][i].cap -= d;
                    let r = self.g[x][i].rev;
                    self.g[to][r].cap += d;
                    return d;
                }
            }
            self.it[x] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.it.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}

/// Max flow from a super-source (capacity `source[v]` into `v`) to a
/// super-sink (capacity `sink[v]` out of `v`) over the edges of `g` between
/// `alive` vertices, each with capacity `cap` in both directions.
pub(crate) fn max_flow(g: &ViewGraph, alive: &[bool], source: &[i64], sink: &[i64], cap: i64) -> FlowOutcome {
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut d = Dinic::new(n + 2);
    let mut src_arc = vec![None; n];
    let mut snk_arc = vec![None; n];
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        if source[v] > 0 {
            src_arc[v] = Some(d.add(s, v, source[v], 0));
        }
        if sink[v] > 0 {
            snk_arc[v] = Some(d.add(v, t, sink[v], 0));
        }
    }
    let mut edge_arc = vec![None; g.num_edges()];
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        if alive[a as usize] && alive[b as usize] {
            edge_arc[k] = Some(d.add(a as usize, b as usize, cap, cap));
        }
    }
    let value = d.run(s, t);
    let used = |d: &Dinic, arc: Option<(usize, usize)>, full: i64| arc.map_or(0, |(x, i)| full - d.g[x][i].cap);
    let edge_flow = edge_arc.iter().map(|&a| used(&d, a, cap)).collect();
    let supplied = (0..n).map(|v| used(&d, src_arc[v], source[v])).collect();
    let absorbed = (0..n).map(|v| used(&d, snk_arc[v], sink[v])).collect();
    d.bfs(s);
    let source_side = (0..n).map(|v| d.level[v] >= 0).collect();
    FlowOutcome { value, edge_flow, supplied, absorbed, source_side }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_bottleneck() {
        let g = ViewGraph::from_parts(3, &[(0, 1), (1, 2)], &[]);
        let out = max_flow(&g, &[true; 3], &[5, 0, 0], &[0, 0, 5], 2);
        assert_eq!(out.value, 2);
        assert_eq!(out.edge_flow, vec![2, 2]);
        assert_eq!(out.source_side, vec![true, false, false]);
    }
}
