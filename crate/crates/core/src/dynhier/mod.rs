//! Fully dynamic expander decomposition and hierarchy.
//!
//! A cluster is watched by a multi-level pruning process (`MlpState`). The
//! CD-process wraps it and re-decomposes each published snapshot with a
//! nested ED-process; the ED-process owns the CD-processes of a partition
//! and restarts clusters whose process expired. One ED-process per level,
//! stacked through contraction, gives the dynamic hierarchy.

mod hier;
mod mlp;
mod process;

pub use hier::{hier_apply, hier_connected, hier_path, DeltaOp, DynHierarchy, DynStats, DynamicEd, LevelStats, RecourseDelta};
pub use mlp::{mlp_apply, MlpState, MlpStep};
pub use process::{CdState, EdState};

use crate::decomp::DecompParams;
use crate::error::{Error, Result};
use crate::rational::{ratio, to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct DynParams {
    /// `α`, `φ` and the knobs of every (re)decomposition.
    pub decomp: DecompParams,
    /// Batch growth factor `ψ ≥ 2`.
    pub psi: u64,
    /// Slack base `σ`; the pruning levels lose a factor `σ` each.
    pub slack_base: u64,
    /// `h`: the update limit is capped at `ψ^h`, so `ħ ≤ h`.
    pub mlp_depth: u32,
    /// Replaces `ρ = σ^h ψ / α`.
    pub rho_override: Option<f64>,
    /// `c_z` in the whole-level budget `Z = ⌈c_z φ m / ρ⌉`.
    pub budget_scale: f64,
    pub depth_cap: usize,
    pub seed: u64,
}

impl DynParams {
    pub fn new(alpha: Rational, phi: Rational) -> Self {
        Self {
            decomp: DecompParams::new(alpha, phi),
            psi: 4,
            slack_base: 38,
            mlp_depth: 1,
            rho_override: None,
            budget_scale: 1.0,
            depth_cap: 64,
            seed: 0,
        }
    }

    pub fn alpha(&self) -> Rational {
        self.decomp.alpha
    }

    pub fn phi(&self) -> Rational {
        self.decomp.phi
    }

    pub fn rho(&self) -> f64 {
        self.rho_override.unwrap_or_else(|| {
            (self.slack_base as f64).powi(self.mlp_depth as i32) * self.psi as f64 / to_f64(self.alpha())
        })
    }

    /// `N = min(⌊φ' vol / ρ⌋, ψ^h)`.
    pub fn update_limit(&self, phi: Rational, vol: u64) -> u64 {
        let n = (to_f64(phi) * vol as f64 / self.rho()).floor().max(0.0) as u64;
        n.min(self.psi.saturating_pow(self.mlp_depth))
    }

    /// `Z = max(1, ⌈c_z φ m / ρ⌉)`.
    pub fn level_budget(&self, m: u64) -> u64 {
        ((self.budget_scale * to_f64(self.phi()) * m as f64 / self.rho()).ceil() as u64).max(1)
    }

    /// `σ^k` with the factor applied to a rational.
    pub(crate) fn shrink(&self, r: Rational, k: u32) -> Rational {
        r / ratio((self.slack_base as i64).pow(k), 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.psi < 2 {
            return Err(Error::Parameter(format!("psi must be at least 2, got {}", self.psi)));
        }
        if self.slack_base < 1 {
            return Err(Error::Parameter("slack base must be positive".into()));
        }
        if self.mlp_depth < 1 {
            return Err(Error::Parameter("pruning depth must be at least 1".into()));
        }
        if (self.slack_base as f64).powi(self.mlp_depth as i32) > 1e12 {
            return Err(Error::Parameter("slack base ^ depth overflows".into()));
        }
        if let Some(r) = self.rho_override {
            if !(r > 0.0) {
                return Err(Error::Parameter(format!("rho must be positive, got {r}")));
            }
        }
        if !(self.budget_scale > 0.0) {
            return Err(Error::Parameter("budget scale must be positive".into()));
        }
        let (a, p) = (self.alpha(), self.phi());
        if p <= ratio(0, 1) || p >= ratio(1, 2) {
            return Err(Error::Parameter(format!("phi must lie in (0, 1/2), got {p}")));
        }
        if a <= ratio(0, 1) || a > ratio(3, 5) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 3/5], got {a}")));
        }
        Ok(())
    }
}

impl Default for DynParams {
    fn default() -> Self {
        Self::new(ratio(1, 16), ratio(1, 64))
    }
}

/// Mutable bookkeeping shared by all processes of one hierarchy.
#[derive(Clone, Debug, Default)]
pub(crate) struct Counters {
    pub next_key: u64,
    pub calls: u64,
    /// Current level batch; the graph a batch sees is already final.
    pub batch: u64,
    pub stats: DynStats,
}

/// Per-update scratch context for the processes of one level.
pub(crate) struct Ctx<'a> {
    pub graph: &'a crate::graph::DynGraph,
    pub params: &'a DynParams,
    pub counters: &'a mut Counters,
    /// Vertices whose cluster may have changed.
    pub dirty: Vec<crate::graph::VertexId>,
}

impl Ctx<'_> {
    pub fn fresh_key(&mut self) -> u64 {
        self.counters.next_key += 1;
        self.counters.next_key
    }

    pub fn next_seed(&mut self) -> u64 {
        self.counters.calls += 1;
        crate::decomp::mix(self.params.seed, self.counters.calls)
    }
}
