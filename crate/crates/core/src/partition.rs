//! Las Vegas degree-preserving splits and the recursive equipartition.
//!
//! A single split draws uniform vertex subsets until both induced sides keep
//! their minimum relative degree above `max(0, delta - 2 n^(-1/3))`, where
//! `delta` is the input graph's minimum relative degree and `n` its order.
//! The recursive equipartition halves the block count per level (odd counts
//! split floor/ceil) and concatenates, so a graph on `m * ell` vertices ends
//! up as `m` blocks of exactly `ell` vertices. Claimed bounds telescope the
//! per-level cost; at desk scale they are often negative, which is why the
//! acceptance threshold clamps at zero and the reports keep the measured
//! degrees regardless.

use serde::Serialize;
use thiserror::Error;

use crate::generate::{derive_seed, rng_from_seed, sample_subset};
use crate::graph::{DegreeMode, OrientedGraph, VertexId};

const LEFT_TAG: u64 = 0x4c;
const RIGHT_TAG: u64 = 0x52;

/// Relative-degree floor a split must reach on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitThreshold {
    /// Minimum relative degree of the graph being split.
    pub delta: f64,
    /// Order of the graph being split.
    pub n: usize,
    /// `max(0, delta - 2 n^(-1/3))`.
    pub value: f64,
}

impl SplitThreshold {
    pub fn new(delta: f64, n: usize) -> Self {
        let raw = delta - 2.0 / (n as f64).cbrt();
        SplitThreshold {
            delta,
            n,
            value: raw.max(0.0),
        }
    }
}

/// Outcome record of one split node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    /// Samples drawn, including the accepted one.
    pub attempts: usize,
    pub threshold: SplitThreshold,
    /// Measured min relative degree of the side that was sampled (`left`).
    pub achieved_left: f64,
    /// Measured min relative degree of the complement side.
    pub achieved_right: f64,
    pub mode: DegreeMode,
    /// Sampled side, original vertex ids, sorted.
    pub left: Vec<VertexId>,
    /// Complement side, original vertex ids, sorted.
    pub right: Vec<VertexId>,
    /// Both achieved values reached the (clamped) threshold.
    pub met_threshold: bool,
    /// The acceptance loop ran out of attempts and a best-effort sample was
    /// taken instead of an accepted one.
    pub exhausted: bool,
}

/// Equal-size blocks of the original vertex set plus the per-node split
/// evidence and the telescoped bound claimed for this recursion depth.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    /// Blocks over the original graph's ids, each of size `part_size`.
    pub blocks: Vec<Vec<VertexId>>,
    pub part_size: usize,
    /// One report per internal recursion node, pre-order.
    pub reports: Vec<SplitReport>,
    /// `theoretical_bound(delta, part_size, k)`; may be negative.
    pub bound_claimed: f64,
    /// Minimum relative degree of the input graph.
    pub delta: f64,
    /// Recursion depth used: minimal `k` with `m <= 2^k`.
    pub k: u32,
    pub mode: DegreeMode,
    pub seed: u64,
}

impl Partition {
    /// True if any node fell back to a best-effort sample.
    pub fn best_effort_used(&self) -> bool {
        self.reports.iter().any(|r| r.exhausted)
    }

    /// True if any node's measured degrees sit below its threshold.
    pub fn below_threshold(&self) -> bool {
        self.reports.iter().any(|r| !r.met_threshold)
    }
}

/// Per-block telescoped guarantee: `delta - 2 ell^(-1/3) * sum_{j<k} 2^(-j/3)`.
/// Not clamped; callers decide how to treat negative values.
pub fn theoretical_bound(delta: f64, ell: usize, k: u32) -> f64 {
    let corr: f64 = (0..k).map(|j| (2.0f64).powf(-(j as f64) / 3.0)).sum();
    delta - 2.0 / (ell as f64).cbrt() * corr
}

/// Depth-independent form `delta - 10 ell^(-1/3)`; dominated by
/// [`theoretical_bound`] for every `k` because `2 / (1 - 2^(-1/3)) < 10`.
pub fn simplified_bound(delta: f64, ell: usize) -> f64 {
    delta - 10.0 / (ell as f64).cbrt()
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("split size {m1} outside [n/4, n/2] for n = {n}")]
    Precondition { n: usize, m1: usize },
    #[error("no sample passed the degree threshold within {max_attempts} attempts")]
    AttemptsExhausted {
        max_attempts: usize,
        /// Best-scoring rejected sample (max of min(left, right) achieved
        /// degree), if any sample was drawn at all.
        best: Option<Box<SplitCandidate>>,
    },
}

/// A sampled split and its measured degrees, kept when no sample is accepted.
#[derive(Debug, Clone)]
pub struct SplitCandidate {
    pub left: Vec<VertexId>,
    pub report: SplitReport,
}

fn side_relative_degree(g: &OrientedGraph, side: &[VertexId], mode: DegreeMode) -> f64 {
    g.induced(side).graph.min_relative_degree(mode)
}

fn evaluate_split(
    g: &OrientedGraph,
    left: &[VertexId],
    mode: DegreeMode,
    threshold: SplitThreshold,
    attempts: usize,
) -> SplitReport {
    let mut in_left = vec![false; g.n()];
    for &v in left {
        in_left[v] = true;
    }
    let right: Vec<VertexId> = (0..g.n()).filter(|&v| !in_left[v]).collect();
    let achieved_left = side_relative_degree(g, left, mode);
    let achieved_right = side_relative_degree(g, &right, mode);
    SplitReport {
        attempts,
        threshold,
        achieved_left,
        achieved_right,
        mode,
        left: left.to_vec(),
        right,
        met_threshold: achieved_left >= threshold.value && achieved_right >= threshold.value,
        exhausted: false,
    }
}

/// Draws uniform `m1`-subsets of `V(g)` until both induced sides have min
/// relative degree at least `max(0, delta - 2 n^(-1/3))`. Returns the
/// accepted side and its report; `report.attempts` counts samples drawn.
///
/// Requires `n/4 <= m1 <= n/2` (the regime the recursion produces). On
/// exhaustion the error carries the best-scoring rejected sample so callers
/// can degrade gracefully.
pub fn random_split(
    g: &OrientedGraph,
    m1: usize,
    mode: DegreeMode,
    seed: u64,
    max_attempts: usize,
) -> Result<(Vec<VertexId>, SplitReport), SplitError> {
    let n = g.n();
    if 4 * m1 < n || 2 * m1 > n {
        return Err(SplitError::Precondition { n, m1 });
    }
    let threshold = SplitThreshold::new(g.min_relative_degree(mode), n);
    let mut rng = rng_from_seed(seed);
    let mut best: Option<SplitCandidate> = None;

    for attempt in 1..=max_attempts {
        let left = sample_subset(n, m1, &mut rng);
        let report = evaluate_split(g, &left, mode, threshold, attempt);
        if report.met_threshold {
            return Ok((left, report));
        }
        let score = report.achieved_left.min(report.achieved_right);
        let beats = best
            .as_ref()
            .is_none_or(|b| score > b.report.achieved_left.min(b.report.achieved_right));
        if beats {
            best = Some(SplitCandidate { left, report });
        }
    }
    Err(SplitError::AttemptsExhausted {
        max_attempts,
        best: best.map(Box::new),
    })
}

/// Left/right step in a recursion path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Left,
    Right,
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("part size {ell} does not divide graph order {n}")]
    Divisibility { n: usize, ell: usize },
    #[error("part size must be at least 1")]
    ZeroPartSize,
    #[error("split at {} exhausted {max_attempts} attempts", format_path(path))]
    AttemptsExhausted {
        path: Vec<Branch>,
        max_attempts: usize,
    },
}

fn format_path(path: &[Branch]) -> String {
    if path.is_empty() {
        return "root".to_string();
    }
    let tail: String = path
        .iter()
        .map(|b| match b {
            Branch::Left => "/L",
            Branch::Right => "/R",
        })
        .collect();
    format!("root{tail}")
}

/// How the recursion reacts when a node exhausts its attempt budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPolicy {
    /// Propagate the failure with the recursion path attached.
    Strict,
    /// Continue with the best-scoring sample (or a single forced sample when
    /// no attempts were permitted) and mark the node as exhausted.
    BestEffort,
}

/// Recursively equipartitions `V(g)` into blocks of exactly `ell` vertices.
///
/// A graph on `m * ell` vertices splits off `floor(m/2) * ell` vertices via
/// [`random_split`], recurses on both sides with derived seeds, and
/// concatenates the blocks. `k` is recorded as the minimal depth with
/// `m <= 2^k`, which gives the strongest claimed bound.
pub fn recursive_equipartition(
    g: &OrientedGraph,
    ell: usize,
    mode: DegreeMode,
    seed: u64,
    max_attempts: usize,
    policy: SplitPolicy,
) -> Result<Partition, PartitionError> {
    if ell == 0 {
        return Err(PartitionError::ZeroPartSize);
    }
    if g.n() == 0 || !g.n().is_multiple_of(ell) {
        return Err(PartitionError::Divisibility { n: g.n(), ell });
    }
    let m = g.n() / ell;
    let k = m.next_power_of_two().trailing_zeros();
    let original: Vec<VertexId> = (0..g.n()).collect();
    let mut blocks = Vec::with_capacity(m);
    let mut reports = Vec::new();
    let mut path = Vec::new();
    split_node(
        g, &original, ell, mode, seed, max_attempts, policy, &mut blocks, &mut reports, &mut path,
    )?;
    Ok(Partition {
        blocks,
        part_size: ell,
        reports,
        bound_claimed: theoretical_bound(g.min_relative_degree(mode), ell, k),
        delta: g.min_relative_degree(mode),
        k,
        mode,
        seed,
    })
}

/// One recursion node: `sub` is the induced graph on `ids` (original ids,
/// ascending, so `sub` vertex `i` is `ids[i]`).
#[allow(clippy::too_many_arguments)]
fn split_node(
    sub: &OrientedGraph,
    ids: &[VertexId],
    ell: usize,
    mode: DegreeMode,
    seed: u64,
    max_attempts: usize,
    policy: SplitPolicy,
    blocks: &mut Vec<Vec<VertexId>>,
    reports: &mut Vec<SplitReport>,
    path: &mut Vec<Branch>,
) -> Result<(), PartitionError> {
    let m = sub.n() / ell;
    if m == 1 {
        blocks.push(ids.to_vec());
        return Ok(());
    }
    let m1 = (m / 2) * ell;
    let (left_local, mut report) = match random_split(sub, m1, mode, seed, max_attempts) {
        Ok(found) => found,
        Err(SplitError::AttemptsExhausted { best, .. }) if policy == SplitPolicy::BestEffort => {
            match best {
                Some(cand) => {
                    let mut report = cand.report;
                    report.exhausted = true;
                    (cand.left, report)
                }
                None => {
                    // max_attempts = 0: no sample was scored, draw one anyway
                    let threshold = SplitThreshold::new(sub.min_relative_degree(mode), sub.n());
                    let left = sample_subset(sub.n(), m1, &mut rng_from_seed(seed));
                    let mut report = evaluate_split(sub, &left, mode, threshold, 0);
                    report.exhausted = true;
                    (left, report)
                }
            }
        }
        Err(SplitError::AttemptsExhausted { max_attempts, .. }) => {
            return Err(PartitionError::AttemptsExhausted {
                path: path.clone(),
                max_attempts,
            });
        }
        Err(SplitError::Precondition { n, m1 }) => {
            unreachable!("recursion always splits within [n/4, n/2]: n = {n}, m1 = {m1}")
        }
    };

    // relabel both sides back to original ids
    let left_ids: Vec<VertexId> = report.left.iter().map(|&v| ids[v]).collect();
    let right_ids: Vec<VertexId> = report.right.iter().map(|&v| ids[v]).collect();
    report.left = left_ids.clone();
    report.right = right_ids.clone();
    reports.push(report);

    let left_sub = sub.induced(&left_local);
    let right_local: Vec<VertexId> = {
        let mut in_left = vec![false; sub.n()];
        for &v in &left_local {
            in_left[v] = true;
        }
        (0..sub.n()).filter(|&v| !in_left[v]).collect()
    };
    let right_sub = sub.induced(&right_local);

    path.push(Branch::Left);
    split_node(
        &left_sub.graph,
        &left_ids,
        ell,
        mode,
        derive_seed(seed, LEFT_TAG),
        max_attempts,
        policy,
        blocks,
        reports,
        path,
    )?;
    path.pop();
    path.push(Branch::Right);
    split_node(
        &right_sub.graph,
        &right_ids,
        ell,
        mode,
        derive_seed(seed, RIGHT_TAG),
        max_attempts,
        policy,
        blocks,
        reports,
        path,
    )?;
    path.pop();
    Ok(())
}

/// Structural and degree recheck of a partition, by recomputation.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionVerdict {
    pub sizes_ok: bool,
    pub disjoint: bool,
    pub covering: bool,
    /// `min_degree(induced(g, block)) / part_size` per block, in block order.
    pub block_relative_degrees: Vec<f64>,
    pub failures: Vec<String>,
}

impl PartitionVerdict {
    pub fn structural_ok(&self) -> bool {
        self.sizes_ok && self.disjoint && self.covering
    }
}

/// Recomputes block sizes, disjointness, coverage and each block's minimum
/// relative degree. Never fails; problems land in the verdict.
pub fn verify_partition(g: &OrientedGraph, p: &Partition, mode: DegreeMode) -> PartitionVerdict {
    let mut failures = Vec::new();
    let sizes_ok = p.blocks.iter().all(|b| b.len() == p.part_size);
    if !sizes_ok {
        failures.push("some block has size != part_size".to_string());
    }
    let mut seen = vec![0usize; g.n()];
    let mut disjoint = true;
    for block in &p.blocks {
        for &v in block {
            if v >= g.n() {
                disjoint = false;
                failures.push(format!("vertex {v} out of range"));
            } else {
                seen[v] += 1;
                if seen[v] == 2 {
                    disjoint = false;
                    failures.push(format!("vertex {v} appears in multiple blocks"));
                }
            }
        }
    }
    let covering = seen.iter().all(|&c| c >= 1);
    if !covering {
        failures.push("blocks do not cover the vertex set".to_string());
    }
    let block_relative_degrees = p
        .blocks
        .iter()
        .map(|b| side_relative_degree(g, b, mode))
        .collect();
    PartitionVerdict {
        sizes_ok,
        disjoint,
        covering,
        block_relative_degrees,
        failures,
    }
}
