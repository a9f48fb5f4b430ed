//! Fully dynamic expander pruning on a cluster `U`.
//!
//! An incremental flow instance lives on the initial `G[U]^w` with edge
//! capacity `2/φ`; every update injects `8/φ` at each endpoint inside `U`.
//! The pruned set is the flow's pruned set.

use crate::error::{Error, Result};
use crate::graph::{DynGraph, EdgeOp, VertexId, ViewGraph};
use crate::incflow::IncFlowState;
use crate::rational::{ratio, Rational};

#[derive(Clone, Debug)]
pub struct PruningState {
    alpha: Rational,
    phi: Rational,
    w: Rational,
    updates: u64,
    k_max: u64,
    flow: IncFlowState,
    pruned: Vec<VertexId>,
}

impl PruningState {
    /// Starts pruning `U`; requires `α/φ ≤ w ≤ 3/(5φ)`.
    pub fn new(graph: &DynGraph, u: &[VertexId], alpha: Rational, phi: Rational, w: Rational) -> Result<Self> {
        if phi <= ratio(0, 1) || phi > ratio(1, 1) || alpha < ratio(0, 1) || alpha > ratio(1, 1) {
            return Err(Error::Parameter(format!("need 0 < phi <= 1 and 0 <= alpha <= 1, got {alpha}, {phi}")));
        }
        let upper = ratio(3, 5) / phi;
        if alpha / phi > upper {
            return Err(Error::Parameter(format!("empty weight range: alpha = {alpha} exceeds 3/5")));
        }
        if w < alpha / phi || w > upper {
            return Err(Error::Parameter(format!("w = {w} outside [alpha/phi, 3/(5 phi)] = [{}, {upper}]", alpha / phi)));
        }
        let view = graph.weighted_view(u, w)?.materialize();
        let (p, q) = (*phi.numer(), *phi.denom());
        // ⌊φ · vol / 120⌋
        let k_max = (p as u128 * view.volume() as u128 / (120 * q as u128)) as u64;
        let flow = IncFlowState::new(view, 2 * q, p)?;
        Ok(Self { alpha, phi, w, updates: 0, k_max, flow, pruned: Vec::new() })
    }

    /// Feeds one edge update; returns the vertices newly added to `P`.
    /// Insertions and deletions are treated alike.
    pub fn apply(&mut self, _op: EdgeOp, u: VertexId, v: VertexId) -> Result<Vec<VertexId>> {
        let view = self.flow.graph();
        let mut ends: Vec<usize> = [u, v].iter().filter_map(|&x| view.local(x)).collect();
        ends.dedup();
        if ends.is_empty() {
            return Ok(Vec::new());
        }
        if self.updates >= self.k_max {
            return Err(Error::Expired);
        }
        self.updates += 1;
        let amount = 8 * *self.phi.denom();
        let mut fresh = Vec::new();
        for x in ends {
            let inj = self.flow.inject_source(x, amount)?;
            fresh.extend(inj.newly_pruned.iter().map(|&j| self.flow.graph().global(j)));
        }
        fresh.sort_unstable();
        self.pruned.extend_from_slice(&fresh);
        self.pruned.sort_unstable();
        Ok(fresh)
    }

    pub fn cluster(&self) -> &[VertexId] {
        self.flow.graph().globals()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.flow.graph().local(v).is_some()
    }

    /// The initial `G[U]^w`.
    pub fn initial_view(&self) -> &ViewGraph {
        self.flow.graph()
    }

    pub fn pruned(&self) -> &[VertexId] {
        &self.pruned
    }

    pub fn is_pruned(&self, v: VertexId) -> bool {
        self.pruned.binary_search(&v).is_ok()
    }

    /// `U \ P`.
    pub fn remaining(&self) -> Vec<VertexId> {
        self.cluster().iter().copied().filter(|&v| !self.is_pruned(v)).collect()
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn phi(&self) -> Rational {
        self.phi
    }

    pub fn weight(&self) -> Rational {
        self.w
    }

    pub fn work(&self) -> u64 {
        self.flow.work()
    }

    /// `vol_{G[U]^w}(P)` in the initial view.
    pub fn pruned_volume(&self) -> u64 {
        self.flow.pruned_volume()
    }
}

pub fn pruner_new(graph: &DynGraph, u: &[VertexId], alpha: Rational, phi: Rational, w: Rational) -> Result<PruningState> {
    PruningState::new(graph, u, alpha, phi, w)
}

pub fn pruner_apply(state: &mut PruningState, op: EdgeOp, u: VertexId, v: VertexId) -> Result<Vec<VertexId>> {
    state.apply(op, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(n: usize, copies: usize) -> DynGraph {
        let mut g = DynGraph::with_vertices(n);
        for _ in 0..copies {
            for i in 0..n {
                for j in i + 1..n {
                    g.insert_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn fresh_state_and_budget() {
        let g = dense(16, 2);
        let u: Vec<_> = (0..16).collect();
        let st = pruner_new(&g, &u, ratio(1, 10), ratio(1, 2), ratio(1, 1)).unwrap();
        assert!(st.pruned().is_empty());
        // vol = 16 · 30 = 480, ⌊480/2/120⌋ = 2
        assert_eq!(st.k_max(), 2);
    }

    #[test]
    fn weight_range_enforced() {
        let g = dense(4, 1);
        let u: Vec<_> = (0..4).collect();
        assert!(pruner_new(&g, &u, ratio(1, 2), ratio(1, 10), ratio(1, 1)).is_err());
        assert!(pruner_new(&g, &u, ratio(7, 10), ratio(1, 2), ratio(7, 5)).is_err());
    }

    #[test]
    fn expiry_is_signalled() {
        let mut g = dense(16, 2);
        let u: Vec<_> = (0..8).collect();
        let mut st = pruner_new(&g, &u, ratio(1, 10), ratio(1, 2), ratio(1, 1)).unwrap();
        let k = st.k_max();
        for t in 0..k {
            g.delete_edge(0, 1 + t as usize).unwrap();
            st.apply(EdgeOp::Delete, 0, 1 + t as usize).unwrap();
        }
        assert_eq!(st.apply(EdgeOp::Insert, 0, 1), Err(Error::Expired));
        // updates outside U are ignored
        assert_eq!(st.apply(EdgeOp::Insert, 9, 10), Ok(vec![]));
    }
}
