//! Toolkit for degree-preserving equipartitions and cycle-factors in oriented graphs.
//!
//! The pipeline: split an oriented graph into equal-size blocks while keeping
//! every block's minimum relative degree close to the whole graph's
//! ([`partition`]), find a spanning copy of an arbitrarily oriented cycle in
//! each block ([`hamilton`]), and assemble the pieces into a verified
//! cycle-factor ([`factor`]). The [`experiments`] module Monte Carlo-checks the
//! probabilistic machinery behind the splitting step.

pub mod edgelist;
pub mod experiments;
pub mod factor;
pub mod generate;
pub mod graph;
pub mod hamilton;
pub mod partition;

pub use graph::{DegreeMode, Direction, GraphError, Induced, OrientedGraph, VertexId};
