//! The cut-matching step: certify that a view expands, or return a sparse cut
//! that is either balanced or leaves a near-expander behind.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{VertexId, ViewGraph};
use crate::maxflow;
use crate::rational::{ratio, ratio_at_least, ratio_at_most, Rational};

/// Views up to this many vertices use the exhaustive cut player.
pub const EXACT_THRESHOLD: usize = 16;

#[derive(Clone, Debug)]
pub struct CutMatchParams {
    pub gamma_krv: u64,
    pub exact_threshold: usize,
    /// `γ_0` in the round count `⌈γ_0 log² m⌉` of the randomized player.
    pub rounds_scale: f64,
}

impl CutMatchParams {
    /// Defaults for a view of volume `m`.
    pub fn for_volume(m: u64) -> Self {
        Self { gamma_krv: default_gamma_krv(m), exact_threshold: EXACT_THRESHOLD, rounds_scale: 1.0 }
    }
}

pub fn log2m(m: u64) -> f64 {
    (m.max(2) as f64).log2()
}

/// `⌈10 log² max(m, 2)⌉`.
pub fn default_gamma_krv(m: u64) -> u64 {
    (10.0 * log2m(m).powi(2)).ceil() as u64
}

/// A cut `(A, Ā)` of a view; `a_bar[i]` marks local vertex `i` as in `Ā`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub a_bar: Vec<bool>,
    pub crossing: u64,
    pub vol_a: u64,
    pub vol_a_bar: u64,
}

impl Cut {
    pub fn new(view: &ViewGraph, a_bar: Vec<bool>) -> Self {
        let crossing = view.cut(&a_bar);
        let vol_a_bar = view.volume_of(&a_bar);
        Self { crossing, vol_a: view.volume() - vol_a_bar, vol_a_bar, a_bar }
    }

    pub fn min_volume(&self) -> u64 {
        self.vol_a.min(self.vol_a_bar)
    }

    /// Global ids of `A` and `Ā`.
    pub fn sides(&self, view: &ViewGraph) -> (Vec<VertexId>, Vec<VertexId>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, &x) in self.a_bar.iter().enumerate() {
            if x {
                b.push(view.global(i));
            } else {
                a.push(view.global(i));
            }
        }
        (a, b)
    }

    /// Conductance at most `r` (crossing-free cuts count as 0).
    pub fn conductance_at_most(&self, r: Rational) -> bool {
        self.crossing == 0 || ratio_at_most(self.crossing, self.min_volume(), r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutMatchResult {
    /// The view is certified to have conductance at least `8φ`. `exact` is
    /// false when the certificate comes from the randomized player.
    Case1 { exact: bool },
    /// Balanced sparse cut.
    Case2(Cut),
    /// Unbalanced sparse cut; `A` is a near `8φ`-expander.
    Case3(Cut),
}

fn check_phi(phi: Rational) -> Result<()> {
    if phi <= ratio(0, 1) || phi >= ratio(1, 2) {
        return Err(Error::Parameter(format!("phi must lie in (0, 1/2), got {phi}")));
    }
    Ok(())
}

/// Balance threshold: `vol(side) · 100γ ≥ vol`.
fn balanced(cut: &Cut, total: u64, gamma: u64) -> bool {
    let need = total as u128;
    (cut.vol_a as u128) * 100 * gamma as u128 >= need && (cut.vol_a_bar as u128) * 100 * gamma as u128 >= need
}

/// Runs the cut-matching step on `view` with expansion parameter `phi`.
pub fn cut_or_certify(view: &ViewGraph, phi: Rational, params: &CutMatchParams, seed: u64) -> Result<CutMatchResult> {
    check_phi(phi)?;
    let comps = view.components();
    if comps.len() > 1 {
        // the lightest component against the rest; crossing-free
        let light = comps.iter().min_by_key(|c| c.iter().map(|&i| view.degree(i)).sum::<u64>()).unwrap();
        let mut a_bar = vec![false; view.n()];
        for &i in light {
            a_bar[i] = true;
        }
        return Ok(CutMatchResult::Case2(Cut::new(view, a_bar)));
    }
    if view.n() <= params.exact_threshold {
        exact_player(view, phi, params.gamma_krv)
    } else {
        randomized_player(view, phi, params, seed)
    }
}

/// Minimum-conductance cut by enumeration; returns the `Ā` side and `Φ` as
/// `(crossing, min-volume)`, or `None` on fewer than two vertices.
pub fn exact_sparsest_cut_small(view: &ViewGraph) -> Result<Option<(Cut, Rational)>> {
    if view.n() > EXACT_THRESHOLD {
        return Err(Error::TooLarge { size: view.n(), limit: EXACT_THRESHOLD });
    }
    let mut best: Option<(u64, u64, u64)> = None;
    for_each_cut(view, &vec![true; view.n()], |mask, crossing, vol| {
        let minvol = vol.min(view.volume() - vol);
        let better = match best {
            None => true,
            Some((bc, bv, _)) => bc != 0 && (crossing == 0 || (crossing as u128) * (bv as u128) < (bc as u128) * (minvol as u128)),
        };
        if better {
            best = Some((crossing, minvol, mask));
        }
    });
    Ok(best.map(|(c, v, mask)| {
        let cut = Cut::new(view, mask_to_side(view.n(), mask));
        let phi = if c == 0 { ratio(0, 1) } else { ratio(c as i64, v as i64) };
        (cut, phi)
    }))
}

fn mask_to_side(n: usize, mask: u64) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Gray-code enumeration of nonempty subsets `S` of `within` (local mask),
/// excluding the full set when `within` is everything; reports
/// `(mask, |E(S, V∖S)|, vol(S))` with volumes and cuts in the whole view.
fn for_each_cut(view: &ViewGraph, within: &[bool], mut visit: impl FnMut(u64, u64, u64)) {
    let members: Vec<usize> = (0..view.n()).filter(|&i| within[i]).collect();
    let k = members.len();
    if k == 0 {
        return;
    }
    // when enumerating cuts of the whole view fix the last vertex outside
    let bits = if k == view.n() { k - 1 } else { k };
    let mut inside = vec![false; view.n()];
    let (mut mask, mut crossing, mut vol) = (0u64, 0i64, 0u64);
    for step in 1u64..(1u64 << bits) {
        let x = members[step.trailing_zeros() as usize];
        let entering = !inside[x];
        for &(y, _) in view.adj(x) {
            if inside[y as usize] == inside[x] {
                crossing += 1;
            } else {
                crossing -= 1;
            }
        }
        inside[x] = entering;
        mask ^= 1 << x;
        if entering {
            vol += view.degree(x);
        } else {
            vol -= view.degree(x);
        }
        visit(mask, crossing as u64, vol);
    }
}

fn exact_player(view: &ViewGraph, phi: Rational, gamma: u64) -> Result<CutMatchResult> {
    let total = view.volume();
    let eight = phi * 8;
    // the most balanced cut among those with conductance below 8φ
    let mut best: Option<(u64, u64)> = None;
    for_each_cut(view, &vec![true; view.n()], |mask, crossing, vol| {
        let minvol = vol.min(total - vol);
        let sparse = crossing == 0 || !ratio_at_least(crossing, minvol, eight);
        if sparse && best.is_none_or(|(bv, _)| minvol > bv) {
            best = Some((minvol, mask));
        }
    });
    let Some((_, mask)) = best else {
        return Ok(CutMatchResult::Case1 { exact: true });
    };
    let cut = Cut::new(view, mask_to_side(view.n(), mask));
    if balanced(&cut, total, gamma) {
        return Ok(CutMatchResult::Case2(cut));
    }
    // Peel sparse pieces off A until it is a near 8φ-expander.
    let mut a_bar = vec![false; view.n()];
    loop {
        let a: Vec<bool> = a_bar.iter().map(|x| !x).collect();
        let vol_a = view.volume_of(&a);
        let mut found = None;
        for_each_cut(view, &a, |mask, crossing, vol| {
            if found.is_none() && vol > 0 && 2 * vol <= vol_a && !ratio_at_least(crossing, vol, eight) {
                found = Some(mask);
            }
        });
        match found {
            Some(mask) => {
                for i in 0..view.n() {
                    if mask >> i & 1 == 1 {
                        a_bar[i] = true;
                    }
                }
            }
            None => break,
        }
    }
    let cut = Cut::new(view, a_bar);
    if balanced(&cut, total, gamma) && cut.conductance_at_most(phi * gamma as i64) {
        // cannot happen when the greedy argument holds, kept as a guard
        return Ok(CutMatchResult::Case2(cut));
    }
    Ok(CutMatchResult::Case3(cut))
}

/// One step of a fractional matching: `(a, b, weight)` in flow units.
type Matching = Vec<(usize, usize, i64)>;

fn randomized_player(view: &ViewGraph, phi: Rational, params: &CutMatchParams, seed: u64) -> Result<CutMatchResult> {
    let n = view.n();
    let total = view.volume();
    let gamma = params.gamma_krv;
    let rounds = (params.rounds_scale * log2m(total).powi(2)).ceil().max(1.0) as usize;
    let (p, q) = (*phi.numer(), *phi.denom());
    let deg: Vec<f64> = (0..n).map(|i| view.degree(i) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matchings: Vec<Matching> = Vec::new();
    let mut a_bar = vec![false; n];
    let eight = phi * 8;

    for _ in 0..rounds {
        let alive: Vec<bool> = a_bar.iter().map(|x| !x).collect();
        let live: Vec<usize> = (0..n).filter(|&i| alive[i] && view.degree(i) > 0).collect();
        if live.len() < 2 {
            break;
        }
        // random degree-centred direction pushed through the matchings
        let mut u: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let vol_live: f64 = live.iter().map(|&i| deg[i]).sum();
        let mean = live.iter().map(|&i| deg[i] * u[i]).sum::<f64>() / vol_live;
        for &i in &live {
            u[i] -= mean;
        }
        for m in &matchings {
            for &(a, b, x) in m {
                let diff = u[b] - u[a];
                let xa = (x as f64 / (2.0 * deg[a] * p as f64)).min(0.5);
                let xb = (x as f64 / (2.0 * deg[b] * p as f64)).min(0.5);
                u[a] += xa * diff;
                u[b] -= xb * diff;
            }
        }
        let mut order = live.clone();
        order.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));

        // sweep along the projection for a sparse cut of the whole view
        if let Some(cut) = sweep(view, &order, eight) {
            if balanced(&cut, total, gamma) {
                return Ok(CutMatchResult::Case2(cut));
            }
        }

        // sources: lowest coordinates up to vol/8; sinks: the top half
        let vol_alive = view.volume_of(&alive);
        let mut source = vec![0i64; n];
        let mut sink = vec![0i64; n];
        let mut acc = 0u64;
        for &i in &order {
            if 8 * acc >= vol_alive {
                break;
            }
            acc += view.degree(i);
            source[i] = p * view.degree(i) as i64;
        }
        let mut acc = 0u64;
        for &i in order.iter().rev() {
            if 2 * acc >= vol_alive || source[i] > 0 {
                break;
            }
            acc += view.degree(i);
            sink[i] = p * view.degree(i) as i64;
        }
        let need: i64 = source.iter().sum();
        let flow = maxflow::max_flow(view, &alive, &source, &sink, q);
        if flow.value == need {
            matchings.push(decompose_paths(view, &alive, &flow.edge_flow, &flow.supplied, &flow.absorbed));
            continue;
        }
        // the min cut is sparse; move its lighter side into Ā
        let s_side: Vec<bool> = (0..n).map(|i| alive[i] && flow.source_side[i]).collect();
        let t_side: Vec<bool> = (0..n).map(|i| alive[i] && !flow.source_side[i]).collect();
        let lighter = if view.volume_of(&s_side) <= view.volume_of(&t_side) { s_side } else { t_side };
        for i in 0..n {
            if lighter[i] {
                a_bar[i] = true;
            }
        }
        let cut = Cut::new(view, a_bar.clone());
        if balanced(&cut, total, gamma) && cut.conductance_at_most(phi * gamma as i64) {
            return Ok(CutMatchResult::Case2(cut));
        }
    }
    if a_bar.iter().any(|&x| x) {
        Ok(CutMatchResult::Case3(Cut::new(view, a_bar)))
    } else {
        Ok(CutMatchResult::Case1 { exact: false })
    }
}

/// Best prefix cut along `order` if its conductance is below `limit`.
fn sweep(view: &ViewGraph, order: &[usize], limit: Rational) -> Option<Cut> {
    let n = view.n();
    let total = view.volume();
    let mut inside = vec![false; n];
    let (mut crossing, mut vol) = (0i64, 0u64);
    let mut best: Option<(u64, u64, usize)> = None;
    for (k, &x) in order.iter().enumerate().take(order.len().saturating_sub(1)) {
        for &(y, _) in view.adj(x) {
            if inside[y as usize] {
                crossing -= 1;
            } else {
                crossing += 1;
            }
        }
        inside[x] = true;
        vol += view.degree(x);
        let minvol = vol.min(total - vol);
        if minvol == 0 {
            continue;
        }
        let c = crossing as u64;
        if best.is_none_or(|(bc, bv, _)| (c as u128) * (bv as u128) < (bc as u128) * (minvol as u128)) {
            best = Some((c, minvol, k));
        }
    }
    let (c, v, k) = best?;
    if ratio_at_least(c, v, limit) {
        return None;
    }
    let mut a_bar = vec![false; n];
    for &x in &order[..=k] {
        a_bar[x] = true;
    }
    Some(Cut::new(view, a_bar))
}

/// Splits a feasible flow into source-to-sink paths, one matching pair each.
fn decompose_paths(view: &ViewGraph, alive: &[bool], edge_flow: &[i64], supplied: &[i64], absorbed: &[i64]) -> Matching {
    let n = view.n();
    let mut flow = edge_flow.to_vec();
    let mut supply = supplied.to_vec();
    let mut demand = absorbed.to_vec();
    // outgoing flow along edge k from x
    let out = |flow: &[i64], k: usize, x: usize| -> i64 {
        let (a, _) = view.edges()[k];
        if a as usize == x {
            flow[k]
        } else {
            -flow[k]
        }
    };
    let mut pairs = Vec::new();
    for s in 0..n {
        while alive[s] && supply[s] > 0 {
            // walk forward along positive flow, cancelling any cycle met
            let mut path: Vec<(usize, usize)> = Vec::new();
            let mut on_path = vec![usize::MAX; n];
            let mut x = s;
            on_path[s] = 0;
            loop {
                if demand[x] > 0 {
                    break;
                }
                let next = view.adj(x).iter().find(|&&(_, k)| out(&flow, k as usize, x) > 0);
                let Some(&(y, k)) = next else { break };
                let (y, k) = (y as usize, k as usize);
                path.push((x, k));
                if on_path[y] != usize::MAX {
                    let start = on_path[y];
                    let cyc = &path[start..];
                    let amt = cyc.iter().map(|&(z, kk)| out(&flow, kk, z)).min().unwrap();
                    for &(z, kk) in cyc {
                        let (a, _) = view.edges()[kk];
                        if a as usize == z {
                            flow[kk] -= amt;
                        } else {
                            flow[kk] += amt;
                        }
                    }
                    for &(z, _) in &path[start + 1..] {
                        on_path[z] = usize::MAX;
                    }
                    path.truncate(start);
                    x = y;
                    continue;
                }
                on_path[y] = path.len();
                x = y;
            }
            let t = x;
            if demand[t] == 0 {
                // only happens on an inconsistent flow; drop the remainder
                supply[s] = 0;
                break;
            }
            let mut amt = supply[s].min(demand[t]);
            for &(z, k) in &path {
                amt = amt.min(out(&flow, k, z));
            }
            for &(z, k) in &path {
                let (a, _) = view.edges()[k];
                if a as usize == z {
                    flow[k] -= amt;
                } else {
                    flow[k] += amt;
                }
            }
            supply[s] -= amt;
            demand[t] -= amt;
            if s != t {
                pairs.push((s, t, amt));
            }
        }
    }
    pairs
}
