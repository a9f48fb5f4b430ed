//! Python bindings. Results cross the boundary as JSON or text strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;

use exphier::apps::{build_cap_tree, treewidth_bags};
use exphier::decomp::{self, build_static_hierarchy, DecompParams};
use exphier::dynhier::{DynHierarchy, DynParams};
use exphier::stream::{flow_estimate, parse_stream, run_stream, StreamOptions};
use exphier::{parse_rational, DynGraph, EdgeOp, VertexId};

fn py_err(e: exphier::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn decomp_params(alpha: &str, phi: &str) -> exphier::Result<DecompParams> {
    Ok(DecompParams::new(parse_rational(alpha)?, parse_rational(phi)?))
}

fn dyn_params(alpha: &str, phi: &str, seed: u64) -> exphier::Result<DynParams> {
    let mut p = DynParams::new(parse_rational(alpha)?, parse_rational(phi)?);
    p.seed = seed;
    p.validate()?;
    Ok(p)
}

/// Decomposition of every vertex, with its verification report, as JSON.
pub fn decompose_json(graph: &str, alpha: &str, phi: &str, seed: u64) -> exphier::Result<String> {
    let g = DynGraph::parse(graph)?;
    let all: Vec<VertexId> = g.vertices().collect();
    let d = decomp::decompose(&g, &all, &decomp_params(alpha, phi)?, seed)?;
    let report = d.verify(&g, 16);
    let passed = report.passed();
    Ok(json!({ "decomposition": d, "report": report, "passed": passed }).to_string())
}

/// Capacitated tree text and bag text of the static hierarchy.
pub fn hierarchy_text(graph: &str, alpha: &str, phi: &str, seed: u64, max_depth: usize) -> exphier::Result<(String, String)> {
    let g = DynGraph::parse(graph)?;
    let h = build_static_hierarchy(&g, &decomp_params(alpha, phi)?, seed, max_depth)?;
    Ok((build_cap_tree(&h).to_text(), treewidth_bags(&h)?.to_text()))
}

/// Replays a stream; returns one JSON line per query plus the summary.
pub fn stream_lines(graph: &str, stream: &str, alpha: &str, phi: &str, seed: u64, audit: bool) -> exphier::Result<Vec<String>> {
    let g = DynGraph::parse(graph)?;
    let ops = parse_stream(stream)?;
    let mut h = DynHierarchy::new(g, dyn_params(alpha, phi, seed)?)?;
    let mut out = Vec::new();
    let summary = run_stream(&mut h, &ops, &StreamOptions { audit }, |v| out.push(v.to_string()))?;
    out.push(json!({ "summary": summary }).to_string());
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (graph, alpha = "1/16", phi = "1/64", seed = 0))]
fn decompose(graph: &str, alpha: &str, phi: &str, seed: u64) -> PyResult<String> {
    decompose_json(graph, alpha, phi, seed).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, alpha = "1/16", phi = "1/64", seed = 0, max_depth = 64))]
fn hierarchy(graph: &str, alpha: &str, phi: &str, seed: u64, max_depth: usize) -> PyResult<(String, String)> {
    hierarchy_text(graph, alpha, phi, seed, max_depth).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (graph, stream, alpha = "1/16", phi = "1/64", seed = 0, audit = false))]
fn dynamic(graph: &str, stream: &str, alpha: &str, phi: &str, seed: u64, audit: bool) -> PyResult<Vec<String>> {
    stream_lines(graph, stream, alpha, phi, seed, audit).map_err(py_err)
}

/// A fully dynamic expander hierarchy.
#[pyclass(unsendable)]
struct Hierarchy {
    inner: DynHierarchy,
}

#[pymethods]
impl Hierarchy {
    #[new]
    #[pyo3(signature = (graph, alpha = "1/16", phi = "1/64", seed = 0))]
    fn new(graph: &str, alpha: &str, phi: &str, seed: u64) -> PyResult<Self> {
        let g = DynGraph::parse(graph).map_err(py_err)?;
        let inner = DynHierarchy::new(g, dyn_params(alpha, phi, seed).map_err(py_err)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Inserts `u v`; returns the number of cascaded changes.
    fn insert(&mut self, u: VertexId, v: VertexId) -> PyResult<usize> {
        let deltas = self.inner.apply(EdgeOp::Insert, u, v).map_err(py_err)?;
        Ok(deltas.iter().map(|d| d.len()).sum())
    }

    fn delete(&mut self, u: VertexId, v: VertexId) -> PyResult<usize> {
        let deltas = self.inner.apply(EdgeOp::Delete, u, v).map_err(py_err)?;
        Ok(deltas.iter().map(|d| d.len()).sum())
    }

    fn connected(&self, u: VertexId, v: VertexId) -> PyResult<bool> {
        self.inner.connected(u, v).map_err(py_err)
    }

    fn flow_estimate(&self, s: VertexId, t: VertexId) -> PyResult<u64> {
        flow_estimate(&self.inner, s, t).map_err(py_err)
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }

    /// Consistency report of every maintained level, as JSON.
    fn check(&self) -> String {
        self.inner.check(16).to_json()
    }
}

#[pymodule]
fn exphier_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic, m)?)?;
    m.add_class::<Hierarchy>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4: &str = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

    #[test]
    fn decompose_reports_pass() {
        let v: serde_json::Value = serde_json::from_str(&decompose_json(K4, "1/16", "1/64", 0).unwrap()).unwrap();
        assert_eq!(v["passed"], true);
    }

    #[test]
    fn hierarchy_has_tree_and_bags() {
        let (tree, bags) = hierarchy_text(K4, "1/16", "1/64", 0, 64).unwrap();
        assert!(tree.starts_with("node 0 level 0"));
        assert!(bags.contains("bag 0:"));
    }

    #[test]
    fn stream_ends_with_summary() {
        let out = stream_lines(K4, "QC 0 3\nD 0 3\nQC 0 3\n", "1/16", "1/64", 0, false).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out[2].contains("summary"));
        assert!(dyn_params("1/16", "2/3", 0).is_err());
    }
}
