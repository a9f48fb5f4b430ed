use crate::error::{Error, Result};
use crate::graph::{DynGraph, EdgeOp, VertexId};
use crate::prune::PruningState;
use crate::rational::Rational;

use super::DynParams;

#[derive(Clone, Debug)]
struct Level {
    pruner: Option<PruningState>,
    /// `P^s`, sorted.
    snapshot: Vec<VertexId>,
}

/// Multi-level pruning on a cluster `U` with parameters `(α, φ')`.
#[derive(Clone, Debug)]
pub struct MlpState {
    u: Vec<VertexId>,
    alpha: Rational,
    phi: Rational,
    limit: u64,
    t: u64,
    hbar: u32,
    /// `ℓ_0 … ℓ_ħ`.
    ell: Vec<u64>,
    /// Level `s` lives at index `s - 1`.
    levels: Vec<Level>,
    slack_base: u64,
    pruner_expired: bool,
}

/// What one update changed among the published snapshots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MlpStep {
    /// The level `s̄` whose snapshot `P^{s̄}` was replaced by a different set.
    pub changed: Option<usize>,
    /// Levels below `s̄` whose nonempty snapshot was reset to `∅`.
    pub cleared: Vec<usize>,
}

impl MlpState {
    pub fn new(graph: &DynGraph, u: &[VertexId], alpha: Rational, phi: Rational, params: &DynParams) -> Result<Self> {
        let mut u = u.to_vec();
        u.sort_unstable();
        u.dedup();
        let limit = params.update_limit(phi, graph.volume(u.iter().copied()));
        let hbar = if limit == 0 { 0 } else { ceil_log(limit, params.psi).max(1) };
        let mut ell = vec![1u64];
        for s in 1..=hbar {
            ell.push(if s == hbar { limit } else { params.psi.pow(s) });
        }
        let mut st = Self {
            u,
            alpha,
            phi,
            limit,
            t: 0,
            hbar,
            ell,
            levels: Vec::new(),
            slack_base: params.slack_base,
            pruner_expired: false,
        };
        for s in 1..=hbar as usize {
            let pruner = st.fresh_pruner(graph, s, params, &[])?;
            st.levels.push(Level { pruner, snapshot: Vec::new() });
        }
        // levels were created bottom-up with Q^s = ∅, which is what a start needs
        Ok(st)
    }

    fn fresh_pruner(&self, graph: &DynGraph, s: usize, params: &DynParams, q: &[VertexId]) -> Result<Option<PruningState>> {
        let rest: Vec<VertexId> = self.u.iter().copied().filter(|v| q.binary_search(v).is_err()).collect();
        if rest.is_empty() {
            return Ok(None);
        }
        let k = self.hbar - s as u32;
        let (a, p) = (params.shrink(self.alpha, k), params.shrink(self.phi, k));
        PruningState::new(graph, &rest, a, p, self.alpha / self.phi).map(Some)
    }

    /// `Q^s`: union of the snapshots strictly above `s`, sorted.
    pub fn q(&self, s: usize) -> Vec<VertexId> {
        let mut q: Vec<VertexId> = self.levels.iter().skip(s).flat_map(|l| l.snapshot.iter().copied()).collect();
        q.sort_unstable();
        q
    }

    /// Handles one update; `Error::Expired` once the update limit is used up
    /// or a level's pruner ran out of budget.
    pub fn apply(&mut self, graph: &DynGraph, params: &DynParams, op: EdgeOp, a: VertexId, b: VertexId) -> Result<MlpStep> {
        if !self.contains(a) && !self.contains(b) {
            return Ok(MlpStep::default());
        }
        if self.t >= self.limit || self.pruner_expired {
            return Err(Error::Expired);
        }
        self.t += 1;
        for lvl in &mut self.levels {
            if let Some(p) = &mut lvl.pruner {
                if let Err(e) = p.apply(op, a, b) {
                    if e == Error::Expired {
                        self.pruner_expired = true;
                    }
                    return Err(e);
                }
            }
        }
        let t = self.t;
        let mut step = MlpStep::default();
        for s in (1..=self.hbar as usize).rev() {
            if s < self.hbar as usize && t.is_multiple_of(self.ell[s]) {
                if !self.levels[s - 1].snapshot.is_empty() {
                    step.cleared.push(s);
                }
                self.levels[s - 1].snapshot.clear();
                let q = self.q(s);
                self.levels[s - 1].pruner = self.fresh_pruner(graph, s, params, &q)?;
            } else if t.is_multiple_of(self.ell[s - 1]) {
                let lvl = &mut self.levels[s - 1];
                let working = lvl.pruner.as_ref().map(|p| p.pruned().to_vec()).unwrap_or_default();
                if working != lvl.snapshot {
                    lvl.snapshot = working;
                    step.changed = Some(s);
                }
            }
        }
        Ok(step)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.u.binary_search(&v).is_ok()
    }

    pub fn cluster(&self) -> &[VertexId] {
        &self.u
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn phi(&self) -> Rational {
        self.phi
    }

    /// The update limit `N`.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn updates(&self) -> u64 {
        self.t
    }

    pub fn expired(&self) -> bool {
        self.t >= self.limit || self.pruner_expired
    }

    pub fn pruner_expired(&self) -> bool {
        self.pruner_expired
    }

    pub fn hbar(&self) -> u32 {
        self.hbar
    }

    /// `ℓ_s`.
    pub fn batch_len(&self, s: usize) -> u64 {
        self.ell[s]
    }

    /// `P^s`.
    pub fn snapshot(&self, s: usize) -> &[VertexId] {
        &self.levels[s - 1].snapshot
    }

    /// `P̃^s`.
    pub fn working(&self, s: usize) -> &[VertexId] {
        self.levels[s - 1].pruner.as_ref().map_or(&[], |p| p.pruned())
    }

    /// The level whose snapshot holds `v`.
    pub fn level_of(&self, v: VertexId) -> Option<usize> {
        self.levels.iter().position(|l| l.snapshot.binary_search(&v).is_ok()).map(|i| i + 1)
    }

    /// `U \ Q^0`.
    pub fn core(&self) -> Vec<VertexId> {
        let q = self.q(0);
        self.u.iter().copied().filter(|v| q.binary_search(v).is_err()).collect()
    }

    /// `σ^ħ`.
    pub fn slack(&self) -> u64 {
        self.slack_base.pow(self.hbar)
    }
}

pub fn mlp_apply(state: &mut MlpState, graph: &DynGraph, params: &DynParams, op: EdgeOp, u: VertexId, v: VertexId) -> Result<MlpStep> {
    state.apply(graph, params, op, u, v)
}

/// Smallest `k` with `base^k ≥ n`.
fn ceil_log(n: u64, base: u64) -> u32 {
    let mut k = 0;
    let mut p = 1u64;
    while p < n {
        p = p.saturating_mul(base);
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

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

    fn params() -> DynParams {
        let mut p = DynParams::new(ratio(1, 16), ratio(1, 4));
        p.slack_base = 2;
        p.mlp_depth = 2;
        p.rho_override = Some(100.0);
        p
    }

    #[test]
    fn ceil_log_values() {
        assert_eq!(ceil_log(1, 4), 0);
        assert_eq!(ceil_log(4, 4), 1);
        assert_eq!(ceil_log(5, 4), 2);
        assert_eq!(ceil_log(16, 4), 2);
    }

    #[test]
    fn schedule_and_limits() {
        let g = dense(16, 40);
        let u: Vec<_> = (0..16).collect();
        let st = MlpState::new(&g, &u, ratio(1, 16), ratio(1, 4), &params()).unwrap();
        // vol = 9600, N = min(⌊9600/4/100⌋, 4²) = 16
        assert_eq!(st.limit(), 16);
        assert_eq!(st.hbar(), 2);
        assert_eq!((st.batch_len(0), st.batch_len(1), st.batch_len(2)), (1, 4, 16));
        assert_eq!(st.slack(), 4);
    }

    #[test]
    fn zero_limit_expires_at_once() {
        let g = dense(4, 1);
        let u: Vec<_> = (0..4).collect();
        let mut st = MlpState::new(&g, &u, ratio(1, 16), ratio(1, 4), &DynParams::new(ratio(1, 16), ratio(1, 4))).unwrap();
        assert_eq!(st.limit(), 0);
        assert_eq!(st.apply(&g, &DynParams::default(), EdgeOp::Delete, 0, 1), Err(Error::Expired));
    }

    #[test]
    fn core_stays_heavy_under_deletions() {
        let mut g = dense(16, 40);
        let p = params();
        let u: Vec<_> = (0..16).collect();
        let vol0 = g.volume(u.iter().copied());
        let mut st = MlpState::new(&g, &u, ratio(1, 16), ratio(1, 4), &p).unwrap();
        let mut t = 0;
        'outer: for rep in 0..40 {
            for j in 1..16 {
                g.delete_edge(0, j).unwrap();
                match st.apply(&g, &p, EdgeOp::Delete, 0, j) {
                    Ok(_) => {}
                    Err(Error::Expired) => break 'outer,
                    Err(e) => panic!("{e}"),
                }
                t += 1;
                let core = st.core();
                assert!(2 * g.volume(core.iter().copied()) >= vol0 - 2 * t, "rep {rep}");
                let q = st.q(0);
                let cut = g.edges_between(&q, &core);
                assert!(cut <= 48 * st.limit());
            }
        }
        assert!(t > 0);
    }

    #[test]
    fn isolating_a_vertex_prunes_it() {
        let mut g = dense(16, 40);
        let p = params();
        let u: Vec<_> = (0..16).collect();
        let mut st = MlpState::new(&g, &u, ratio(1, 16), ratio(1, 4), &p).unwrap();
        let mut changed = false;
        'outer: for _ in 0..40 {
            for j in 1..16 {
                if g.multiplicity(0, j) == 0 {
                    continue;
                }
                g.delete_edge(0, j).unwrap();
                match st.apply(&g, &p, EdgeOp::Delete, 0, j) {
                    Ok(s) => changed |= s.changed.is_some(),
                    Err(Error::Expired) => break 'outer,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        // either the process ran out of budget first or a snapshot moved
        assert!(changed || st.expired());
    }
}
