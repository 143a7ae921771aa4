//! Oriented-graph representation and degree queries.
//!
//! An oriented graph has no loops and at most one directed edge between any
//! vertex pair. The representation is dual: a bit matrix for O(1) pair
//! lookups and adjacency lists for neighborhood iteration. Graphs are
//! immutable once built; construction goes through [`OrientedGraphBuilder`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense vertex index in `[0, n)`, stable within one graph instance.
pub type VertexId = usize;

/// Edge direction relative to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Edges leaving the vertex.
    Out,
    /// Edges entering the vertex.
    In,
}

/// Which minimum-degree notion an operation measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// Minimum over all vertices of `min(out-degree, in-degree)`.
    Semi,
    /// Minimum over all vertices of `out-degree + in-degree`.
    Total,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("anti-parallel pair: {0} -> {1} conflicts with existing {1} -> {0}")]
    AntiParallel(VertexId, VertexId),
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: VertexId, n: usize },
}

/// Immutable oriented graph: no loops, no anti-parallel edge pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    edge_count: usize,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    // row-major n*n bit matrix; bit (u*n + v) set iff edge u -> v
    matrix: Vec<u64>,
}

impl OrientedGraph {
    /// The empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        OrientedGraph {
            n,
            edge_count: 0,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            matrix: vec![0u64; (n * n).div_ceil(64)],
        }
    }

    /// Builds a graph from a directed edge list, rejecting loops, duplicates
    /// and anti-parallel pairs.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut b = OrientedGraphBuilder::new(n);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// O(1) membership test for the directed pair `(u, v)`.
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        debug_assert!(u < self.n && v < self.n);
        let bit = u * self.n + v;
        self.matrix[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v]
    }

    pub fn neighbors(&self, v: VertexId, dir: Direction) -> &[VertexId] {
        match dir {
            Direction::Out => self.out_neighbors(v),
            Direction::In => self.in_neighbors(v),
        }
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v].len()
    }

    /// All edges in `(source, target)` order, sorted lexicographically.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in &self.out_adj[u] {
                out.push((u, v));
            }
        }
        out
    }

    /// Minimum semi-degree (`Semi`) or minimum total degree (`Total`).
    /// Returns 0 for the empty vertex set.
    pub fn min_degree(&self, mode: DegreeMode) -> usize {
        (0..self.n)
            .map(|v| match mode {
                DegreeMode::Semi => self.out_degree(v).min(self.in_degree(v)),
                DegreeMode::Total => self.out_degree(v) + self.in_degree(v),
            })
            .min()
            .unwrap_or(0)
    }

    /// Minimum degree divided by the graph order; 0.0 for the empty graph.
    pub fn min_relative_degree(&self, mode: DegreeMode) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.min_degree(mode) as f64 / self.n as f64
    }

    /// Number of neighbors of `v` (in the given direction) that lie in `w`.
    pub fn degree_into(
        &self,
        v: VertexId,
        w: &[VertexId],
        dir: Direction,
    ) -> Result<usize, GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        let mut mask = vec![false; self.n];
        for &u in w {
            assert!(u < self.n, "degree_into: set member {u} out of range");
            mask[u] = true;
        }
        Ok(self.neighbors(v, dir).iter().filter(|&&u| mask[u]).count())
    }

    /// Induced subgraph on `w`, relabeled densely to `[0, |w|)` in ascending
    /// order of original id. Panics if `w` contains duplicates or ids >= n.
    pub fn induced(&self, w: &[VertexId]) -> Induced {
        let mut original_ids: Vec<VertexId> = w.to_vec();
        original_ids.sort_unstable();
        if let Some(win) = original_ids.windows(2).find(|win| win[0] == win[1]) {
            panic!("induced: duplicate vertex {} in set", win[0]);
        }
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &old) in original_ids.iter().enumerate() {
            assert!(old < self.n, "induced: vertex {old} out of range");
            new_id[old] = i;
        }
        let mut b = OrientedGraphBuilder::new(original_ids.len());
        for (i, &old) in original_ids.iter().enumerate() {
            for &t in &self.out_adj[old] {
                if new_id[t] != usize::MAX {
                    b.add_edge(i, new_id[t])
                        .expect("induced edges inherit the oriented invariants");
                }
            }
        }
        Induced {
            graph: b.build(),
            original_ids,
        }
    }
}

/// An induced subgraph together with the map back to original vertex ids:
/// `original_ids[new] = old`.
#[derive(Debug, Clone)]
pub struct Induced {
    pub graph: OrientedGraph,
    pub original_ids: Vec<VertexId>,
}

/// Mutable accumulator for building an [`OrientedGraph`].
#[derive(Debug)]
pub struct OrientedGraphBuilder {
    n: usize,
    edge_count: usize,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    matrix: Vec<u64>,
}

impl OrientedGraphBuilder {
    pub fn new(n: usize) -> Self {
        OrientedGraphBuilder {
            n,
            edge_count: 0,
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            matrix: vec![0u64; (n * n).div_ceil(64)],
        }
    }

    fn bit(&self, u: VertexId, v: VertexId) -> bool {
        let bit = u * self.n + v;
        self.matrix[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Adds the directed edge `u -> v`, enforcing the oriented invariants.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.bit(u, v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        if self.bit(v, u) {
            return Err(GraphError::AntiParallel(u, v));
        }
        let bit = u * self.n + v;
        self.matrix[bit / 64] |= 1u64 << (bit % 64);
        self.out_adj[u].push(v);
        self.in_adj[v].push(u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn build(mut self) -> OrientedGraph {
        for adj in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            adj.sort_unstable();
        }
        OrientedGraph {
            n: self.n,
            edge_count: self.edge_count,
            out_adj: self.out_adj,
            in_adj: self.in_adj,
            matrix: self.matrix,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 0 -> 1 -> 2 -> 0.
    pub(crate) fn cyclic_triangle() -> OrientedGraph {
        OrientedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    /// Rotational tournament on 2k+1 vertices: i -> i+1, ..., i -> i+k (mod n).
    fn rotational_tournament(k: usize) -> OrientedGraph {
        let n = 2 * k + 1;
        let mut b = OrientedGraphBuilder::new(n);
        for i in 0..n {
            for j in 1..=k {
                b.add_edge(i, (i + j) % n).unwrap();
            }
        }
        b.build()
    }

    #[test]
    fn min_degree_cyclic_triangle() {
        assert_eq!(cyclic_triangle().min_degree(DegreeMode::Semi), 1);
    }

    #[test]
    fn min_degree_regular_tournament_five() {
        // delta^0 = (n-1)/2 for a regular tournament
        let g = rotational_tournament(2);
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.min_degree(DegreeMode::Semi), 2);
    }

    #[test]
    fn min_degree_edgeless() {
        let g = OrientedGraph::empty(7);
        assert_eq!(g.min_degree(DegreeMode::Total), 0);
        assert_eq!(OrientedGraph::empty(0).min_degree(DegreeMode::Semi), 0);
    }

    #[test]
    fn degree_into_examples() {
        let tri = cyclic_triangle();
        // only edge from 0 into {1, 2} is 0 -> 1
        assert_eq!(tri.degree_into(0, &[1, 2], Direction::Out).unwrap(), 1);
        assert_eq!(tri.degree_into(0, &[], Direction::Out).unwrap(), 0);

        let path = OrientedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree_into(1, &[0, 2], Direction::In).unwrap(), 1);

        assert_eq!(
            tri.degree_into(9, &[0], Direction::Out),
            Err(GraphError::VertexOutOfRange { v: 9, n: 3 })
        );
    }

    #[test]
    fn induced_identity_and_single_edge() {
        let tri = cyclic_triangle();
        let whole = tri.induced(&[0, 1, 2]);
        assert_eq!(whole.graph, tri);
        assert_eq!(whole.original_ids, vec![0, 1, 2]);

        let sub = tri.induced(&[0, 1]);
        assert_eq!(sub.graph.edges(), vec![(0, 1)]);
    }

    #[test]
    fn induced_degrees_match_degree_into() {
        let g = crate::generate::random_oriented(20, 0.5, 11).unwrap();
        let w: Vec<VertexId> = (0..20).step_by(2).collect();
        let sub = g.induced(&w);
        for (new, &old) in sub.original_ids.iter().enumerate() {
            assert_eq!(
                sub.graph.out_degree(new),
                g.degree_into(old, &w, Direction::Out).unwrap()
            );
            assert_eq!(
                sub.graph.in_degree(new),
                g.degree_into(old, &w, Direction::In).unwrap()
            );
        }
    }

    #[test]
    fn builder_rejects_invalid_edges() {
        let mut b = OrientedGraphBuilder::new(3);
        assert_eq!(b.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        b.add_edge(0, 1).unwrap();
        assert_eq!(b.add_edge(0, 1), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(b.add_edge(1, 0), Err(GraphError::AntiParallel(1, 0)));
        assert_eq!(
            b.add_edge(0, 3),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        );
    }

    #[test]
    fn neighborhood_views_consistent() {
        let g = crate::generate::random_tournament(9, 5);
        for u in 0..g.n() {
            for &v in g.out_neighbors(u) {
                assert!(g.in_neighbors(v).contains(&u));
                assert!(g.has_edge(u, v));
                assert!(!g.has_edge(v, u));
            }
        }
    }
}
