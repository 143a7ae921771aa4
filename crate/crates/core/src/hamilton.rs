//! Exact search for a spanning copy of an arbitrarily oriented cycle.
//!
//! An orientation pattern assigns each consecutive cycle edge a direction:
//! `Forward` means position `i` points at position `i+1` (mod length), so the
//! all-forward pattern is the directed cycle. Existence of an embedding is
//! invariant under rotating the pattern and under traversing the cycle
//! backwards with all directions flipped; both searches exploit the rotation
//! invariance by pinning vertex 0 to position 0 and trying each distinct
//! rotation, then un-rotating the witness so it realizes the requested
//! pattern as labeled.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{OrientedGraph, VertexId};

/// Direction of one cycle edge relative to increasing position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeDir {
    /// `x_i -> x_{i+1}` (written `+`).
    Forward,
    /// `x_{i+1} -> x_i` (written `-`).
    Backward,
}

impl EdgeDir {
    pub fn flipped(self) -> Self {
        match self {
            EdgeDir::Forward => EdgeDir::Backward,
            EdgeDir::Backward => EdgeDir::Forward,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern length {0} below minimum cycle length 3")]
    TooShort(usize),
    #[error("invalid pattern character {0:?} (expected '+' or '-')")]
    BadChar(char),
}

/// Directions of the consecutive edges of an oriented cycle; text form is a
/// string over `{+, -}`, e.g. `+++-+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientationPattern {
    dirs: Vec<EdgeDir>,
}

impl OrientationPattern {
    pub fn new(dirs: Vec<EdgeDir>) -> Result<Self, PatternError> {
        if dirs.len() < 3 {
            return Err(PatternError::TooShort(dirs.len()));
        }
        Ok(OrientationPattern { dirs })
    }

    /// The directed cycle pattern of the given length.
    pub fn all_forward(len: usize) -> Result<Self, PatternError> {
        Self::new(vec![EdgeDir::Forward; len])
    }

    /// Cycle length; at least 3 by construction.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn dirs(&self) -> &[EdgeDir] {
        &self.dirs
    }

    pub fn dir(&self, i: usize) -> EdgeDir {
        self.dirs[i]
    }

    /// Shift left by `j`: position `i` of the result reads position
    /// `(i + j) mod len` of `self`.
    pub fn rotated(&self, j: usize) -> Self {
        let l = self.len();
        OrientationPattern {
            dirs: (0..l).map(|i| self.dirs[(i + j) % l]).collect(),
        }
    }

    /// Traverse the cycle backwards: every direction flips and the order
    /// reverses. Describes the same abstract oriented cycle.
    pub fn reversed_negated(&self) -> Self {
        OrientationPattern {
            dirs: self.dirs.iter().rev().map(|d| d.flipped()).collect(),
        }
    }

    /// Lexicographically least pattern over all rotations of `self` and of
    /// its reversal-with-negation (`Forward` sorts before `Backward`). Two
    /// patterns describe the same abstract oriented cycle iff their canonical
    /// forms agree.
    pub fn canonical(&self) -> Self {
        let rev = self.reversed_negated();
        (0..self.len())
            .flat_map(|j| [self.rotated(j), rev.rotated(j)])
            .min_by(|a, b| a.dirs.cmp(&b.dirs))
            .expect("length >= 3")
    }

    fn distinct_rotations(&self) -> Vec<(usize, OrientationPattern)> {
        let mut seen = HashSet::new();
        (0..self.len())
            .filter_map(|j| {
                let r = self.rotated(j);
                seen.insert(r.dirs.clone()).then_some((j, r))
            })
            .collect()
    }
}

impl fmt::Display for OrientationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.dirs {
            f.write_str(match d {
                EdgeDir::Forward => "+",
                EdgeDir::Backward => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for OrientationPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dirs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(EdgeDir::Forward),
                '-' => Ok(EdgeDir::Backward),
                other => Err(PatternError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        OrientationPattern::new(dirs)
    }
}

impl Serialize for OrientationPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrientationPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered list of distinct vertices realizing a pattern: if
/// `pattern.dir(i)` is `Forward` the edge `vertices[i] -> vertices[i+1]`
/// (indices mod length) is present, otherwise the reverse edge is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleEmbedding {
    pub vertices: Vec<VertexId>,
    pub pattern: OrientationPattern,
}

/// Semi-degree at which every orientation of a Hamilton cycle is guaranteed
/// for sufficiently large `n`: `ceil((3n - 1) / 8)`.
pub fn guarantee_threshold(n: usize) -> usize {
    debug_assert!(n >= 3);
    (3 * n - 1).div_ceil(8)
}

/// Largest instance the subset DP accepts regardless of the configured cap
/// (memory grows as `2^n * n`).
pub const MAX_DP_VERTICES: usize = 22;

/// Default DP cap; larger instances go to the budgeted backtracker.
pub const DEFAULT_DP_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HamiltonError {
    #[error("instance has {n} vertices, above the DP cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}

/// Exhaustive subset dynamic program over (visited set, last vertex) states.
/// The cycle position equals `|visited| - 1`, which fixes the direction the
/// pattern requires of the next edge. Returns a witness realizing `pattern`
/// as labeled, or `None` when no embedding exists (certified).
pub fn find_cycle_dp(
    g: &OrientedGraph,
    pattern: &OrientationPattern,
    cap: usize,
) -> Result<Option<CycleEmbedding>, HamiltonError> {
    let n = g.n();
    assert_eq!(pattern.len(), n, "pattern length must equal graph order");
    let cap = cap.min(MAX_DP_VERTICES);
    if n > cap {
        return Err(HamiltonError::CapExceeded { n, cap });
    }

    let full: u32 = (1u32 << n) - 1;
    // reach[mask] has bit `last` set iff some path visiting exactly `mask`
    // (which always contains vertex 0 at position 0) ends at `last`
    let mut reach = vec![0u32; 1usize << n];
    let mut parent = vec![0u8; (1usize << n) * n];

    for (offset, rotation) in pattern.distinct_rotations() {
        for r in reach.iter_mut() {
            *r = 0;
        }
        reach[1] = 1; // vertex 0 alone
        // masks containing vertex 0 are exactly the odd ones
        for mask in (1..=full).step_by(2) {
            let mut lasts = reach[mask as usize];
            if lasts == 0 {
                continue;
            }
            let pos = mask.count_ones() as usize - 1;
            if mask == full {
                while lasts != 0 {
                    let last = lasts.trailing_zeros() as usize;
                    lasts &= lasts - 1;
                    let closes = match rotation.dir(n - 1) {
                        EdgeDir::Forward => g.has_edge(last, 0),
                        EdgeDir::Backward => g.has_edge(0, last),
                    };
                    if closes {
                        let w = reconstruct(&parent, full, last, n);
                        return Ok(Some(unrotate(w, offset, pattern)));
                    }
                }
                continue;
            }
            while lasts != 0 {
                let last = lasts.trailing_zeros() as usize;
                lasts &= lasts - 1;
                let nexts = match rotation.dir(pos) {
                    EdgeDir::Forward => g.out_neighbors(last),
                    EdgeDir::Backward => g.in_neighbors(last),
                };
                for &u in nexts {
                    let bit = 1u32 << u;
                    if mask & bit != 0 {
                        continue;
                    }
                    let nm = (mask | bit) as usize;
                    if reach[nm] & bit == 0 {
                        reach[nm] |= bit;
                        parent[nm * n + u] = last as u8;
                    }
                }
            }
        }
    }
    Ok(None)
}

fn reconstruct(parent: &[u8], full: u32, last: usize, n: usize) -> Vec<VertexId> {
    let mut order = vec![0usize; n];
    let mut mask = full;
    let mut v = last;
    for i in (0..n).rev() {
        order[i] = v;
        if i == 0 {
            break;
        }
        let p = parent[(mask as usize) * n + v] as usize;
        mask &= !(1u32 << v);
        v = p;
    }
    order
}

/// `w` realizes `pattern.rotated(offset)` with `w[0]` at rotated position 0;
/// shifting by `offset` makes it realize `pattern` as labeled.
fn unrotate(w: Vec<VertexId>, offset: usize, pattern: &OrientationPattern) -> CycleEmbedding {
    let l = w.len();
    let mut vertices = vec![0; l];
    for (i, v) in w.into_iter().enumerate() {
        vertices[(i + offset) % l] = v;
    }
    CycleEmbedding {
        vertices,
        pattern: pattern.clone(),
    }
}

/// Result of a budgeted search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(CycleEmbedding),
    /// The search tree was exhausted within budget: no embedding exists.
    NotFound,
    /// Budget ran out before exhaustion; the verdict is inconclusive.
    BudgetExhausted { expanded: u64 },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&CycleEmbedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }
}

/// Default node-expansion budget for the backtracker.
pub const DEFAULT_BACKTRACK_BUDGET: u64 = 10_000_000;

/// Depth-first extension of partial paths respecting the pattern, with
/// most-constrained-first candidate ordering and an availability prune.
/// `NotFound` is only reported when the whole tree was exhausted within
/// `budget`; otherwise the outcome is `BudgetExhausted`.
pub fn find_cycle_backtrack(
    g: &OrientedGraph,
    pattern: &OrientationPattern,
    budget: u64,
) -> SearchOutcome {
    let n = g.n();
    assert_eq!(pattern.len(), n, "pattern length must equal graph order");
    let mut remaining = budget;
    for (offset, rotation) in pattern.distinct_rotations() {
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut path = vec![0usize];
        match dfs(g, &rotation, &mut path, &mut visited, &mut remaining) {
            DfsResult::Found => {
                return SearchOutcome::Found(unrotate(path, offset, pattern));
            }
            DfsResult::Exhausted => {}
            DfsResult::OutOfBudget => {
                return SearchOutcome::BudgetExhausted {
                    expanded: budget - remaining,
                };
            }
        }
    }
    SearchOutcome::NotFound
}

enum DfsResult {
    Found,
    Exhausted,
    OutOfBudget,
}

fn dfs(
    g: &OrientedGraph,
    rotation: &OrientationPattern,
    path: &mut Vec<VertexId>,
    visited: &mut [bool],
    budget: &mut u64,
) -> DfsResult {
    let n = g.n();
    let pos = path.len();
    if pos == n {
        let last = path[n - 1];
        let closes = match rotation.dir(n - 1) {
            EdgeDir::Forward => g.has_edge(last, 0),
            EdgeDir::Backward => g.has_edge(0, last),
        };
        return if closes { DfsResult::Found } else { DfsResult::Exhausted };
    }
    if *budget == 0 {
        return DfsResult::OutOfBudget;
    }

    let last = path[pos - 1];
    let mut candidates: Vec<(usize, VertexId)> = g
        .neighbors(last, rotation.dir(pos - 1).into())
        .iter()
        .copied()
        .filter(|&u| !visited[u])
        .map(|u| {
            // most-constrained first: fewest onward options at the next step
            let onward = if pos < n - 1 {
                g.neighbors(u, rotation.dir(pos).into())
                    .iter()
                    .filter(|&&w| !visited[w] && w != u)
                    .count()
            } else {
                0
            };
            (onward, u)
        })
        .collect();
    candidates.sort_unstable();

    for (_, u) in candidates {
        if *budget == 0 {
            return DfsResult::OutOfBudget;
        }
        *budget -= 1;
        visited[u] = true;
        path.push(u);
        if available_prune_ok(g, visited, u, n) {
            match dfs(g, rotation, path, visited, budget) {
                DfsResult::Found => return DfsResult::Found,
                DfsResult::OutOfBudget => return DfsResult::OutOfBudget,
                DfsResult::Exhausted => {}
            }
        }
        path.pop();
        visited[u] = false;
    }
    DfsResult::Exhausted
}

/// Every unvisited vertex must still touch (in either direction) at least one
/// vertex it could sit next to on the cycle: another unvisited vertex, the
/// current path end, or the start.
fn available_prune_ok(g: &OrientedGraph, visited: &[bool], path_end: VertexId, n: usize) -> bool {
    for w in 0..n {
        if visited[w] {
            continue;
        }
        let alive = g
            .out_neighbors(w)
            .iter()
            .chain(g.in_neighbors(w).iter())
            .any(|&x| !visited[x] || x == path_end || x == 0);
        if !alive {
            return false;
        }
    }
    true
}

impl From<EdgeDir> for crate::graph::Direction {
    fn from(d: EdgeDir) -> Self {
        match d {
            EdgeDir::Forward => crate::graph::Direction::Out,
            EdgeDir::Backward => crate::graph::Direction::In,
        }
    }
}

/// First problem found when checking an embedding against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EmbeddingFailure {
    LengthMismatch { vertices: usize, pattern: usize },
    VertexOutOfRange { index: usize, vertex: VertexId },
    DuplicateVertex { index: usize, vertex: VertexId },
    EdgeViolation { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingVerdict {
    pub ok: bool,
    pub first_failure: Option<EmbeddingFailure>,
}

/// Checks distinctness, length, and every edge's presence and direction.
pub fn verify_embedding(g: &OrientedGraph, emb: &CycleEmbedding) -> EmbeddingVerdict {
    let fail = |f| EmbeddingVerdict {
        ok: false,
        first_failure: Some(f),
    };
    let l = emb.pattern.len();
    if emb.vertices.len() != l {
        return fail(EmbeddingFailure::LengthMismatch {
            vertices: emb.vertices.len(),
            pattern: l,
        });
    }
    let mut seen = HashSet::new();
    for (i, &v) in emb.vertices.iter().enumerate() {
        if v >= g.n() {
            return fail(EmbeddingFailure::VertexOutOfRange { index: i, vertex: v });
        }
        if !seen.insert(v) {
            return fail(EmbeddingFailure::DuplicateVertex { index: i, vertex: v });
        }
    }
    for i in 0..l {
        let a = emb.vertices[i];
        let b = emb.vertices[(i + 1) % l];
        let present = match emb.pattern.dir(i) {
            EdgeDir::Forward => g.has_edge(a, b),
            EdgeDir::Backward => g.has_edge(b, a),
        };
        if !present {
            return fail(EmbeddingFailure::EdgeViolation { index: i });
        }
    }
    EmbeddingVerdict {
        ok: true,
        first_failure: None,
    }
}
