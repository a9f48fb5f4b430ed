//! Boundary-linked expander decompositions, static and fully dynamic expander
//! hierarchies, and the tree queries they support.

pub mod apps;
pub mod battery;
pub mod error;
pub mod graph;
pub mod cutmatch;
pub mod decomp;
pub mod dynhier;
pub mod incflow;
mod maxflow;
pub mod prune;
pub mod oracle;
pub mod rational;
pub mod stream;

pub use error::{Error, Result};
pub use graph::{contract, ContractedGraph, DynGraph, Edge, EdgeId, EdgeOp, VertexId, ViewGraph, WeightedView};
pub use rational::{parse_rational, ratio, Rational};
