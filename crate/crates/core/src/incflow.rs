//! Incremental bounded flow with a grow-only pruned set.
//!
//! The state keeps a feasible flow for the problem `(Δ', T', c)` on the
//! unpruned part `R = V \ P`, where `Δ'(v) = Δ(v) + c·|E({v}, P)|` and
//! `T'(v) = T(v) = deg(v)`. An injection is routed with augmenting paths from
//! the injected vertex. When some of the new mass cannot be routed, the
//! vertices reachable from the super-source in the residual graph form the
//! source side of a minimum cut; they are moved into `P`. Every edge from that
//! set to the rest of `R` is saturated outward, so the flow arriving over it is
//! re-labelled as source mass of its far endpoint and the remaining flow stays
//! feasible without further work.
//!
//! Removing a set `S` lowers the potential `Σ_{v∈R} Δ'(v)` by more than
//! `vol(S)`, and the potential never exceeds the injected total, so
//! `vol(P) ≤ ΣΔ` and `c·|E(P, R)| ≤ ΣΔ`.
//!
//! All quantities are integers in units of `scale` (so `T(v) = scale·deg(v)`).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::ViewGraph;
use crate::maxflow;

#[derive(Clone, Debug)]
pub struct FlowProblem {
    /// Injected source mass `Δ(v)`.
    pub source: Vec<i64>,
    /// Sink capacity `T(v)`.
    pub sink: Vec<i64>,
    /// Uniform edge capacity `c`.
    pub capacity: i64,
    pub scale: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Injection {
    /// Vertices (local indices) that joined `P` during this injection.
    pub newly_pruned: Vec<usize>,
    /// Set when `ΣΔ` exceeds `vol(V)/3`; the quantitative bounds are then void.
    pub guarantee_void: bool,
}

#[derive(Clone, Debug)]
pub struct IncFlowState {
    graph: ViewGraph,
    problem: FlowProblem,
    flow: Vec<i64>,
    /// `c·|E({v}, P)|`
    extra: Vec<i64>,
    /// Mass sent from the super-source into `v`.
    routed: Vec<i64>,
    absorbed: Vec<i64>,
    pruned: Vec<bool>,
    pruned_list: Vec<usize>,
    total: i64,
    void: bool,
    work: u64,
}

impl IncFlowState {
    /// Fresh instance with `Δ ≡ 0`, `T(v) = scale·deg(v)` and edge capacity `c`.
    pub fn new(graph: ViewGraph, capacity: i64, scale: i64) -> Result<Self> {
        if capacity <= 0 {
            return Err(Error::Parameter(format!("edge capacity must be positive, got {capacity}")));
        }
        if scale <= 0 {
            return Err(Error::Parameter(format!("scale must be positive, got {scale}")));
        }
        let n = graph.n();
        let sink = (0..n).map(|v| scale * graph.degree(v) as i64).collect();
        let m = graph.num_edges();
        Ok(Self {
            problem: FlowProblem { source: vec![0; n], sink, capacity, scale },
            graph,
            flow: vec![0; m],
            extra: vec![0; n],
            routed: vec![0; n],
            absorbed: vec![0; n],
            pruned: vec![false; n],
            pruned_list: Vec::new(),
            total: 0,
            void: false,
            work: 0,
        })
    }

    pub fn graph(&self) -> &ViewGraph {
        &self.graph
    }

    pub fn problem(&self) -> &FlowProblem {
        &self.problem
    }

    pub fn is_pruned(&self, v: usize) -> bool {
        self.pruned[v]
    }

    pub fn pruned(&self) -> &[usize] {
        &self.pruned_list
    }

    pub fn pruned_mask(&self) -> &[bool] {
        &self.pruned
    }

    pub fn total_injected(&self) -> i64 {
        self.total
    }

    pub fn guarantee_void(&self) -> bool {
        self.void
    }

    /// Edge scans performed so far.
    pub fn work(&self) -> u64 {
        self.work
    }

    /// `vol(P)` in unscaled degree units.
    pub fn pruned_volume(&self) -> u64 {
        self.pruned_list.iter().map(|&v| self.graph.degree(v)).sum()
    }

    /// `|E(P, V \ P)|` over the instance graph.
    pub fn pruned_boundary(&self) -> u64 {
        self.graph.cut(&self.pruned)
    }

    fn demand(&self, v: usize) -> i64 {
        self.problem.source[v] + self.extra[v]
    }

    /// Residual capacity of edge `k` leaving `from`.
    fn residual(&self, k: usize, from: usize) -> i64 {
        let (a, _) = self.graph.edges()[k];
        if a as usize == from {
            self.problem.capacity - self.flow[k]
        } else {
            self.problem.capacity + self.flow[k]
        }
    }

    fn push(&mut self, k: usize, from: usize, amount: i64) {
        let (a, _) = self.graph.edges()[k];
        if a as usize == from {
            self.flow[k] += amount;
        } else {
            self.flow[k] -= amount;
        }
    }

    /// Increases `Δ(v)` by `amount` and restores the invariants.
    pub fn inject_source(&mut self, v: usize, amount: i64) -> Result<Injection> {
        if v >= self.graph.n() {
            return Err(Error::UnknownVertex(v));
        }
        if amount < 0 {
            return Err(Error::Parameter("negative injection".into()));
        }
        self.problem.source[v] += amount;
        self.total += amount;
        if 3 * self.total > self.problem.scale * self.graph.volume() as i64 {
            self.void = true;
        }
        let mut out = Injection { newly_pruned: Vec::new(), guarantee_void: self.void };
        if self.pruned[v] || amount == 0 {
            return Ok(out);
        }
        if !self.route_from(v) {
            let cut = self.reachable_from(v);
            self.prune_set(&cut);
            out.newly_pruned = cut;
        }
        Ok(out)
    }

    /// Augments from `v` until its demand is fully routed; false if stuck.
    fn route_from(&mut self, v: usize) -> bool {
        let n = self.graph.n();
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut touched = Vec::new();
        while self.routed[v] < self.demand(v) {
            // BFS over the residual graph of R for a vertex with spare sink.
            for &x in &touched {
                seen[x] = false;
                pred[x] = None;
            }
            touched.clear();
            let mut q = VecDeque::from([v]);
            seen[v] = true;
            touched.push(v);
            let mut found = None;
            while let Some(x) = q.pop_front() {
                if self.absorbed[x] < self.problem.sink[x] {
                    found = Some(x);
                    break;
                }
                for &(y, k) in self.graph.adj(x) {
                    self.work += 1;
                    let (y, k) = (y as usize, k as usize);
                    if self.pruned[y] || seen[y] || self.residual(k, x) <= 0 {
                        continue;
                    }
                    seen[y] = true;
                    touched.push(y);
                    pred[y] = Some((x, k));
                    q.push_back(y);
                }
            }
            let Some(t) = found else {
                return false;
            };
            let mut amount = (self.demand(v) - self.routed[v]).min(self.problem.sink[t] - self.absorbed[t]);
            let mut x = t;
            while let Some((p, k)) = pred[x] {
                amount = amount.min(self.residual(k, p));
                x = p;
            }
            let mut x = t;
            while let Some((p, k)) = pred[x] {
                self.push(k, p, amount);
                x = p;
            }
            self.routed[v] += amount;
            self.absorbed[t] += amount;
        }
        true
    }

    /// Vertices of R reachable from the super-source in the residual graph.
    fn reachable_from(&mut self, v: usize) -> Vec<usize> {
        let n = self.graph.n();
        let mut seen = vec![false; n];
        let mut q = VecDeque::new();
        for x in (0..n).filter(|&x| !self.pruned[x] && self.routed[x] < self.demand(x)) {
            seen[x] = true;
            q.push_back(x);
        }
        debug_assert!(seen[v]);
        let mut out = Vec::new();
        while let Some(x) = q.pop_front() {
            out.push(x);
            for &(y, k) in self.graph.adj(x) {
                self.work += 1;
                let (y, k) = (y as usize, k as usize);
                if !self.pruned[y] && !seen[y] && self.residual(k, x) > 0 {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn prune_set(&mut self, set: &[usize]) {
        for &x in set {
            self.pruned[x] = true;
        }
        let c = self.problem.capacity;
        for &x in set {
            for &(y, k) in self.graph.adj(x) {
                let (y, k) = (y as usize, k as usize);
                if self.pruned[y] {
                    continue;
                }
                // saturated from x to y: the incoming flow becomes source mass at y
                debug_assert_eq!(self.residual(k, x), 0);
                self.extra[y] += c;
                self.routed[y] += c;
            }
        }
        self.pruned_list.extend_from_slice(set);
        self.pruned_list.sort_unstable();
    }

    /// Independently re-solves the residual problem on `G[V \ P]^1` with an
    /// exact max-flow. Returns feasibility and the witness edge flow.
    pub fn certify_residual_feasible(&self) -> (bool, Vec<i64>) {
        let alive: Vec<bool> = self.pruned.iter().map(|p| !p).collect();
        let n = self.graph.n();
        let demand: Vec<i64> = (0..n).map(|v| if alive[v] { self.demand(v) } else { 0 }).collect();
        let out = maxflow::max_flow(&self.graph, &alive, &demand, &self.problem.sink, self.problem.capacity);
        let need: i64 = demand.iter().sum();
        (out.value == need, out.edge_flow)
    }

    /// Checks the maintained flow itself: capacities, conservation, demands.
    pub fn maintained_flow_is_feasible(&self) -> bool {
        let n = self.graph.n();
        let c = self.problem.capacity;
        let mut net = vec![0i64; n];
        for (k, &(a, b)) in self.graph.edges().iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            if self.pruned[a] || self.pruned[b] {
                continue;
            }
            if self.flow[k].abs() > c {
                return false;
            }
            net[a] -= self.flow[k];
            net[b] += self.flow[k];
        }
        (0..n).filter(|&v| !self.pruned[v]).all(|v| {
            self.routed[v] == self.demand(v)
                && self.absorbed[v] <= self.problem.sink[v]
                && self.routed[v] + net[v] == self.absorbed[v]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> ViewGraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ViewGraph::from_parts(n, &edges, &[])
    }

    #[test]
    fn fresh_instance() {
        let st = IncFlowState::new(cycle(5), 3, 1).unwrap();
        assert!(st.pruned().is_empty());
        assert!((0..5).all(|v| st.problem().sink[v] == 2));
        assert!(st.certify_residual_feasible().0);
        assert!(IncFlowState::new(cycle(5), 0, 1).is_err());
    }

    #[test]
    fn ample_capacity_keeps_p_empty() {
        let mut st = IncFlowState::new(cycle(6), 100, 1).unwrap();
        let inj = st.inject_source(0, 4).unwrap();
        assert!(inj.newly_pruned.is_empty());
        assert!(!inj.guarantee_void);
        assert!(st.certify_residual_feasible().0);
        assert!(st.maintained_flow_is_feasible());
    }

    #[test]
    fn overload_prunes_and_stays_feasible() {
        // path 0-1-2 with tiny capacity; a large injection at 0 must prune it
        let g = ViewGraph::from_parts(4, &[(0, 1), (1, 2), (2, 3)], &[]);
        let mut st = IncFlowState::new(g, 1, 1).unwrap();
        let inj = st.inject_source(0, 3).unwrap();
        assert_eq!(inj.newly_pruned, vec![0]);
        assert!(st.certify_residual_feasible().0);
        assert!(st.maintained_flow_is_feasible());
        assert!(st.pruned_volume() as i64 <= 2 * st.total_injected());
        assert!((st.pruned_boundary() as i64) <= 2 * st.total_injected());
    }

    #[test]
    fn void_flag_past_a_third() {
        let mut st = IncFlowState::new(cycle(3), 5, 1).unwrap();
        assert!(!st.inject_source(0, 2).unwrap().guarantee_void);
        assert!(st.inject_source(1, 1).unwrap().guarantee_void);
    }
}
