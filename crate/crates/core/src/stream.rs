//! Update streams with interleaved queries, answered through a dynamic hierarchy.

use std::collections::VecDeque;

use serde::Serialize;
use serde_json::{json, Value};

use crate::apps::{build_cap_tree, tree_sparsest_cut, treewidth_bags, INFINITE};
use crate::dynhier::{DynHierarchy, DynStats, LevelStats};
use crate::error::{Error, Result};
use crate::graph::{DynGraph, EdgeOp, VertexId};
use crate::oracle::{exact_mincut_sets, ENUMERATION_LIMIT};
use crate::rational::fmt_rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamOp {
    Insert(VertexId, VertexId),
    Delete(VertexId, VertexId),
    /// `QC u v`
    Connected(VertexId, VertexId),
    /// `QF s t`
    Flow(VertexId, VertexId),
    /// `QS`
    Sparsest,
    /// `QW`
    Treewidth,
}

impl StreamOp {
    pub fn code(&self) -> &'static str {
        match self {
            StreamOp::Insert(..) => "I",
            StreamOp::Delete(..) => "D",
            StreamOp::Connected(..) => "QC",
            StreamOp::Flow(..) => "QF",
            StreamOp::Sparsest => "QS",
            StreamOp::Treewidth => "QW",
        }
    }

    pub fn args(&self) -> Vec<VertexId> {
        match *self {
            StreamOp::Insert(u, v) | StreamOp::Delete(u, v) | StreamOp::Connected(u, v) | StreamOp::Flow(u, v) => vec![u, v],
            StreamOp::Sparsest | StreamOp::Treewidth => Vec::new(),
        }
    }

    pub fn is_update(&self) -> bool {
        matches!(self, StreamOp::Insert(..) | StreamOp::Delete(..))
    }
}

/// A stream op with its 1-based line number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamLine {
    pub line: usize,
    pub op: StreamOp,
}

/// Parses one op per line; blank lines and `#` comments are skipped.
pub fn parse_stream(text: &str) -> Result<Vec<StreamLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let err = |msg: String| Error::Stream { line, msg };
        let pair = || -> Result<(VertexId, VertexId)> {
            if toks.len() != 3 {
                return Err(err(format!("expected `{} u v`", toks[0])));
            }
            let p = |s: &str| s.parse::<VertexId>().map_err(|_| err(format!("bad vertex {s:?}")));
            Ok((p(toks[1])?, p(toks[2])?))
        };
        let nullary = || -> Result<()> {
            if toks.len() != 1 {
                return Err(err(format!("`{}` takes no arguments", toks[0])));
            }
            Ok(())
        };
        let op = match toks[0] {
            "I" => pair().map(|(u, v)| StreamOp::Insert(u, v))?,
            "D" => pair().map(|(u, v)| StreamOp::Delete(u, v))?,
            "QC" => pair().map(|(u, v)| StreamOp::Connected(u, v))?,
            "QF" => pair().map(|(u, v)| StreamOp::Flow(u, v))?,
            "QS" => nullary().map(|_| StreamOp::Sparsest)?,
            "QW" => nullary().map(|_| StreamOp::Treewidth)?,
            other => return Err(err(format!("unknown op {other:?}"))),
        };
        out.push(StreamLine { line, op });
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamOptions {
    /// Cross-check query answers against exact oracles.
    pub audit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StreamSummary {
    pub updates: u64,
    pub queries: u64,
    pub avg_recourse: f64,
    pub max_recourse: u64,
    pub stats: DynStats,
    pub levels: Vec<LevelStats>,
    /// Audited answers that disagreed with the oracle.
    pub audit_failures: u64,
}

/// Estimate of `mincut(s, t)` read off the hierarchy: the smallest tree
/// capacity on the path between the two leaves.
pub fn flow_estimate(h: &DynHierarchy, s: VertexId, t: VertexId) -> Result<u64> {
    let (ps, pt) = (h.path(s)?, h.path(t)?);
    if s == t {
        return Ok(INFINITE);
    }
    if ps.last() != pt.last() {
        return Ok(0);
    }
    let mut best = INFINITE;
    for i in 0..h.depth() {
        if ps[i].1 == pt[i].1 {
            break;
        }
        best = best.min(h.graph(i).degree(ps[i].1)).min(h.graph(i).degree(pt[i].1));
    }
    Ok(best)
}

fn bfs_connected(g: &DynGraph, s: VertexId, t: VertexId) -> bool {
    let mut seen = vec![false; g.vertex_bound()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(x) = queue.pop_front() {
        if x == t {
            return true;
        }
        for e in g.incident(x) {
            let y = e.other(x);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    false
}

fn cap_json(c: u64) -> Value {
    if c == INFINITE {
        json!("inf")
    } else {
        json!(c)
    }
}

/// Answers one query; the second value is `false` when an audit disagreed.
pub fn answer_query(h: &DynHierarchy, op: StreamOp, audit: bool) -> Result<(Value, bool)> {
    let g = h.base();
    Ok(match op {
        StreamOp::Connected(u, v) => {
            let a = h.connected(u, v)?;
            if audit {
                let exact = bfs_connected(g, u, v);
                (json!({ "connected": a, "exact": exact }), a == exact)
            } else {
                (json!(a), true)
            }
        }
        StreamOp::Flow(s, t) => {
            let est = flow_estimate(h, s, t)?;
            let mut ans = json!({ "estimate": cap_json(est) });
            let mut ok = true;
            if audit && s != t && g.num_vertices() <= ENUMERATION_LIMIT {
                let (exact, _) = exact_mincut_sets(g, &[s], &[t])?;
                ans["exact"] = json!(exact);
                ok = est >= exact;
            }
            (ans, ok)
        }
        StreamOp::Sparsest => {
            let tree = build_cap_tree(&h.snapshot());
            match tree_sparsest_cut(&tree) {
                Ok(c) => (json!({ "sparsity": fmt_rational(c.sparsity), "side": c.side.len() }), true),
                Err(e) => (json!({ "error": e.to_string() }), true),
            }
        }
        StreamOp::Treewidth => {
            let b = treewidth_bags(&h.snapshot())?;
            (json!({ "bags": b.bags.len(), "width": b.width() }), true)
        }
        StreamOp::Insert(..) | StreamOp::Delete(..) => {
            return Err(Error::Query("updates are not queries".into()));
        }
    })
}

/// Replays `ops` against `h`, handing one JSON response per query to `emit`.
pub fn run_stream(
    h: &mut DynHierarchy,
    ops: &[StreamLine],
    opts: &StreamOptions,
    mut emit: impl FnMut(&Value),
) -> Result<StreamSummary> {
    let (mut updates, mut queries, mut failures) = (0u64, 0u64, 0u64);
    let before = h.stats().recourse_total;
    let mut max_recourse = 0u64;
    for &StreamLine { line, op } in ops {
        let wrap = |e: Error| Error::Stream { line, msg: e.to_string() };
        match op {
            StreamOp::Insert(u, v) | StreamOp::Delete(u, v) => {
                let kind = if matches!(op, StreamOp::Insert(..)) { EdgeOp::Insert } else { EdgeOp::Delete };
                let deltas = h.apply(kind, u, v).map_err(wrap)?;
                max_recourse = max_recourse.max(deltas.iter().map(|d| d.len() as u64).sum());
                updates += 1;
            }
            _ => {
                let (answer, ok) = answer_query(h, op, opts.audit).map_err(wrap)?;
                queries += 1;
                failures += u64::from(!ok);
                emit(&json!({
                    "op": op.code(),
                    "args": op.args(),
                    "answer": answer,
                    "level_stats": h.level_stats(),
                }));
            }
        }
    }
    let total = h.stats().recourse_total - before;
    Ok(StreamSummary {
        updates,
        queries,
        avg_recourse: if updates == 0 { 0.0 } else { total as f64 / updates as f64 },
        max_recourse,
        stats: h.stats().clone(),
        levels: h.level_stats(),
        audit_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynhier::DynParams;

    #[test]
    fn parses_all_ops() {
        let ops = parse_stream("I 0 1\n\n# c\nD 0 1\nQC 1 2\nQF 0 2\nQS\nQW\n").unwrap();
        let codes: Vec<_> = ops.iter().map(|l| l.op.code()).collect();
        assert_eq!(codes, ["I", "D", "QC", "QF", "QS", "QW"]);
        assert_eq!(ops[1].line, 4);
    }

    #[test]
    fn parse_errors_cite_lines() {
        assert_eq!(parse_stream("I 0 1\nX 1 2").unwrap_err(), Error::Stream { line: 2, msg: "unknown op \"X\"".into() });
        assert!(matches!(parse_stream("QS 1"), Err(Error::Stream { line: 1, .. })));
        assert!(matches!(parse_stream("I 0"), Err(Error::Stream { line: 1, .. })));
        assert!(matches!(parse_stream("QC a 1"), Err(Error::Stream { line: 1, .. })));
    }

    fn path4() -> DynHierarchy {
        let g = DynGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        DynHierarchy::new(g, DynParams::default()).unwrap()
    }

    #[test]
    fn invalid_delete_is_a_stream_error() {
        let mut h = path4();
        let ops = parse_stream("I 2 3\nD 0 3\n").unwrap();
        let err = run_stream(&mut h, &ops, &StreamOptions::default(), |_| {}).unwrap_err();
        assert!(matches!(err, Error::Stream { line: 2, .. }));
    }

    #[test]
    fn empty_stream_has_zero_updates() {
        let mut h = path4();
        let s = run_stream(&mut h, &[], &StreamOptions::default(), |_| {}).unwrap();
        assert_eq!((s.updates, s.queries, s.avg_recourse), (0, 0, 0.0));
    }

    #[test]
    fn audited_answers_agree() {
        let mut h = path4();
        let ops = parse_stream("QC 0 3\nI 2 3\nQC 0 3\nQF 0 3\nQF 1 1\nQS\nQW\nD 1 2\nQC 0 3\nQF 0 3\n").unwrap();
        let mut out = Vec::new();
        let s = run_stream(&mut h, &ops, &StreamOptions { audit: true }, |v| out.push(v.clone())).unwrap();
        assert_eq!(s.audit_failures, 0);
        assert_eq!(s.updates, 2);
        assert_eq!(out.len(), 8);
        assert_eq!(out[0]["answer"]["connected"], json!(false));
        assert_eq!(out[1]["answer"]["connected"], json!(true));
        assert_eq!(out[2]["answer"]["exact"], json!(1));
        assert_eq!(out[3]["answer"]["estimate"], json!("inf"));
        assert_eq!(out[7]["answer"]["estimate"], json!(0));
        for v in &out {
            assert!(v["level_stats"].is_array());
        }
    }
}
