use std::collections::HashMap;

/// Keys of retired clusters by member set, so an unchanged cluster keeps its identity.
pub(crate) type Reuse = HashMap<Vec<VertexId>, u64>;

use crate::decomp::{decompose, Cluster, DecompParams};
use crate::error::{Error, Result};
use crate::graph::{EdgeOp, VertexId};
use crate::rational::Rational;

use super::mlp::MlpState;
use super::Ctx;

/// Multi-level pruning plus one nested ED-process per published snapshot.
#[derive(Clone, Debug)]
pub struct CdState {
    key: u64,
    /// Batch during which the process was built; it already saw the rest of that batch.
    born: u64,
    mlp: MlpState,
    /// Child on `P^s` at index `s - 1`.
    children: Vec<Option<EdState>>,
}

/// A partition of a cluster into CD-processes.
#[derive(Clone, Debug)]
pub struct EdState {
    cluster: Vec<VertexId>,
    phi: Rational,
    slots: Vec<Option<CdState>>,
    free: Vec<usize>,
    owner: HashMap<VertexId, usize>,
}

impl CdState {
    pub(crate) fn new(ctx: &mut Ctx<'_>, u: Vec<VertexId>, phi: Rational) -> Result<Self> {
        let mlp = MlpState::new(ctx.graph, &u, ctx.params.alpha(), phi, ctx.params)?;
        ctx.dirty.extend_from_slice(mlp.cluster());
        let children = vec![None; mlp.hbar() as usize];
        Ok(Self { key: ctx.fresh_key(), born: ctx.counters.batch, mlp, children })
    }

    /// Returns `true` when the process expired and its cluster must restart.
    pub(crate) fn apply(&mut self, ctx: &mut Ctx<'_>, op: EdgeOp, a: VertexId, b: VertexId) -> Result<bool> {
        if self.born == ctx.counters.batch {
            return Ok(false);
        }
        let step = match self.mlp.apply(ctx.graph, ctx.params, op, a, b) {
            Ok(s) => s,
            Err(Error::Expired) => {
                if self.mlp.pruner_expired() {
                    ctx.counters.stats.pruner_expiries += 1;
                } else {
                    ctx.counters.stats.expiries += 1;
                }
                return Ok(true);
            }
            Err(e) => return Err(e),
        };
        let mut reuse = Reuse::new();
        for &s in &step.cleared {
            if let Some(child) = self.children[s - 1].take() {
                ctx.dirty.extend_from_slice(&child.cluster);
            }
        }
        if let Some(s) = step.changed {
            ctx.counters.stats.snapshots += 1;
            if let Some(child) = self.children[s - 1].take() {
                ctx.dirty.extend_from_slice(&child.cluster);
                child.collect_reuse(&mut reuse);
            }
            let p = self.mlp.snapshot(s).to_vec();
            if !p.is_empty() {
                self.children[s - 1] = Some(EdState::with_reuse(ctx, p, self.mlp.phi(), &reuse)?);
            }
        }
        for (i, child) in self.children.iter_mut().enumerate() {
            if step.changed == Some(i + 1) {
                continue;
            }
            if let Some(c) = child {
                if c.contains(a) || c.contains(b) {
                    c.apply(ctx, op, a, b)?;
                }
            }
        }
        Ok(false)
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn mlp(&self) -> &MlpState {
        &self.mlp
    }

    pub fn cluster(&self) -> &[VertexId] {
        self.mlp.cluster()
    }

    pub fn expired(&self) -> bool {
        self.mlp.expired()
    }

    pub fn children(&self) -> impl Iterator<Item = (usize, &EdState)> {
        self.children.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|c| (i + 1, c)))
    }

    fn key_of(&self, v: VertexId) -> Option<u64> {
        match self.mlp.level_of(v) {
            Some(s) => self.children[s - 1].as_ref()?.key_of(v),
            None => self.mlp.contains(v).then_some(self.key),
        }
    }

    fn collect(&self, out: &mut Vec<(u64, Cluster)>) {
        let core = self.mlp.core();
        if !core.is_empty() {
            out.push((self.key, Cluster { members: core, phi: self.mlp.phi(), slack: self.mlp.slack() }));
        }
        for (_, c) in self.children() {
            c.collect(out);
        }
    }

    fn collect_reuse(&self, out: &mut Reuse) {
        let mut all = Vec::new();
        self.collect(&mut all);
        out.extend(all.into_iter().map(|(k, c)| (c.members, k)));
    }

    fn process_sets(&self, out: &mut Vec<Vec<VertexId>>) {
        out.push(self.cluster().to_vec());
        for (_, c) in self.children() {
            c.push_sets(out);
        }
    }
}

impl EdState {
    /// Decomposes `u` with `(α, φ')` and starts a CD-process per cluster.
    pub(crate) fn new(ctx: &mut Ctx<'_>, u: Vec<VertexId>, phi: Rational) -> Result<Self> {
        Self::with_reuse(ctx, u, phi, &Reuse::new())
    }

    pub(crate) fn with_reuse(ctx: &mut Ctx<'_>, u: Vec<VertexId>, phi: Rational, reuse: &Reuse) -> Result<Self> {
        let mut st = Self { cluster: u, phi, slots: Vec::new(), free: Vec::new(), owner: HashMap::new() };
        st.cluster.sort_unstable();
        let members = st.cluster.clone();
        st.spawn(ctx, &members, reuse)?;
        Ok(st)
    }

    fn spawn(&mut self, ctx: &mut Ctx<'_>, members: &[VertexId], reuse: &Reuse) -> Result<()> {
        if members.is_empty() {
            return Ok(());
        }
        let mut params: DecompParams = ctx.params.decomp.clone();
        params.phi = self.phi;
        let seed = ctx.next_seed();
        let d = decompose(ctx.graph, members, &params, seed)?;
        ctx.counters.stats.decompositions += 1;
        for c in d.clusters {
            let mut cd = CdState::new(ctx, c.members, c.phi)?;
            if let Some(&k) = reuse.get(cd.cluster()) {
                cd.key = k;
            }
            self.insert(cd);
        }
        Ok(())
    }

    fn insert(&mut self, cd: CdState) {
        let idx = match self.free.pop() {
            Some(i) => i,
            None => {
                self.slots.push(None);
                self.slots.len() - 1
            }
        };
        for &v in cd.cluster() {
            self.owner.insert(v, idx);
        }
        self.slots[idx] = Some(cd);
    }

    fn take(&mut self, idx: usize) -> CdState {
        let cd = self.slots[idx].take().expect("live slot");
        for v in cd.cluster() {
            self.owner.remove(v);
        }
        self.free.push(idx);
        cd
    }

    /// Re-decomposes the cluster of the process in `idx`, leaving out `exclude`.
    fn restart(&mut self, ctx: &mut Ctx<'_>, idx: usize, exclude: Option<VertexId>) -> Result<()> {
        ctx.counters.stats.restarts += 1;
        let cd = self.take(idx);
        ctx.dirty.extend_from_slice(cd.cluster());
        let mut reuse = Reuse::new();
        cd.collect_reuse(&mut reuse);
        let members: Vec<VertexId> = cd
            .cluster()
            .iter()
            .copied()
            .filter(|&v| Some(v) != exclude && ctx.graph.contains_vertex(v))
            .collect();
        self.spawn(ctx, &members, &reuse)
    }

    /// Re-decomposes every vertex that has an edge; isolated singletons keep their process.
    pub(crate) fn rebuild(&mut self, ctx: &mut Ctx<'_>) -> Result<()> {
        let mut reuse = Reuse::new();
        let mut members = Vec::new();
        for idx in 0..self.slots.len() {
            let Some(cd) = &self.slots[idx] else { continue };
            if cd.cluster().len() == 1 && ctx.graph.degree(cd.cluster()[0]) == 0 {
                continue;
            }
            let cd = self.take(idx);
            cd.collect_reuse(&mut reuse);
            ctx.dirty.extend_from_slice(cd.cluster());
            members.extend(cd.cluster().iter().copied().filter(|&v| ctx.graph.contains_vertex(v)));
        }
        members.sort_unstable();
        self.spawn(ctx, &members, &reuse)
    }

    pub(crate) fn apply(&mut self, ctx: &mut Ctx<'_>, op: EdgeOp, a: VertexId, b: VertexId) -> Result<()> {
        let mut targets: Vec<(usize, u64)> = [a, b]
            .iter()
            .filter_map(|v| self.owner.get(v).map(|&i| (i, self.slots[i].as_ref().expect("live slot").key)))
            .collect();
        targets.dedup();
        for (idx, key) in targets {
            // processes spawned by a restart earlier in this loop already saw the update
            let Some(cd) = self.slots[idx].as_mut().filter(|cd| cd.key == key) else { continue };
            if cd.apply(ctx, op, a, b)? {
                self.restart(ctx, idx, None)?;
            }
        }
        Ok(())
    }

    /// A new isolated vertex becomes a singleton cluster.
    pub(crate) fn add_vertex(&mut self, ctx: &mut Ctx<'_>, v: VertexId) -> Result<()> {
        if self.owner.contains_key(&v) {
            return Err(Error::Consistency(format!("vertex {v} already clustered")));
        }
        let cd = CdState::new(ctx, vec![v], self.phi)?;
        self.insert(cd);
        if let Err(at) = self.cluster.binary_search(&v) {
            self.cluster.insert(at, v);
        }
        Ok(())
    }

    /// Drops a removed vertex; its cluster restarts without it.
    pub(crate) fn remove_vertex(&mut self, ctx: &mut Ctx<'_>, v: VertexId) -> Result<()> {
        if let Ok(at) = self.cluster.binary_search(&v) {
            self.cluster.remove(at);
        }
        ctx.dirty.push(v);
        match self.owner.get(&v).copied() {
            Some(idx) => self.restart(ctx, idx, Some(v)),
            None => Ok(()),
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.owner.contains_key(&v)
    }

    pub fn cluster(&self) -> &[VertexId] {
        &self.cluster
    }

    pub fn phi(&self) -> Rational {
        self.phi
    }

    pub fn processes(&self) -> impl Iterator<Item = &CdState> {
        self.slots.iter().flatten()
    }

    /// Key of the maintained cluster holding `v`.
    pub fn key_of(&self, v: VertexId) -> Option<u64> {
        self.slots[*self.owner.get(&v)?].as_ref()?.key_of(v)
    }

    /// The maintained clusters (cores of every CD-process, at every depth).
    pub fn clusters(&self) -> Vec<(u64, Cluster)> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort_by_key(|(k, _)| *k);
        out
    }

    pub(crate) fn collect_reuse(&self, out: &mut Reuse) {
        for cd in self.processes() {
            cd.collect_reuse(out);
        }
    }

    fn collect(&self, out: &mut Vec<(u64, Cluster)>) {
        for cd in self.processes() {
            cd.collect(out);
        }
    }

    /// Working clusters of all live CD- and ED-processes.
    pub fn process_sets(&self) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        self.push_sets(&mut out);
        out
    }

    fn push_sets(&self, out: &mut Vec<Vec<VertexId>>) {
        out.push(self.cluster.clone());
        for cd in self.processes() {
            cd.process_sets(out);
        }
    }
}
