//! Cycle-factor pipeline: equipartition, per-part Hamilton search, verified
//! certificate.
//!
//! Each block of the partition gets its own orientation pattern (a single
//! pattern may be broadcast to all parts), the blocks are searched hardest
//! first, and a certificate is only produced when every part has a verified
//! embedding. Per-part searches run in parallel; results are assembled by
//! part index so the outcome is independent of scheduling.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{DegreeMode, OrientedGraph, VertexId};
use crate::hamilton::{
    find_cycle_backtrack, find_cycle_dp, guarantee_threshold, verify_embedding, CycleEmbedding,
    OrientationPattern, SearchOutcome, DEFAULT_BACKTRACK_BUDGET, DEFAULT_DP_CAP, MAX_DP_VERTICES,
};
use crate::partition::{
    recursive_equipartition, Partition, PartitionError, SplitPolicy,
};

/// Patterns requested for the parts: one for all, or one per part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternSpec {
    Uniform(OrientationPattern),
    PerPart(Vec<OrientationPattern>),
}

/// Everything a factor run needs besides the graph.
#[derive(Debug, Clone)]
pub struct FactorRequest {
    pub ell: usize,
    /// `None` means the directed cycle (all-forward) for every part.
    pub patterns: Option<PatternSpec>,
    pub mode: DegreeMode,
    pub seed: u64,
    pub max_attempts: usize,
    pub dp_cap: usize,
    pub budget: u64,
    /// Continue past exhausted split nodes with the best-scoring sample.
    pub best_effort: bool,
}

impl FactorRequest {
    pub fn new(ell: usize) -> Self {
        FactorRequest {
            ell,
            patterns: None,
            mode: DegreeMode::Semi,
            seed: 0,
            max_attempts: 100,
            dp_cap: DEFAULT_DP_CAP,
            budget: DEFAULT_BACKTRACK_BUDGET,
            best_effort: false,
        }
    }
}

/// A verified cycle-factor: blocks tile the vertex set and every block
/// carries an embedding of its requested pattern (original vertex ids).
#[derive(Debug, Clone, Serialize)]
pub struct FactorCertificate {
    pub partition: Partition,
    /// One embedding per block, in block order.
    pub embeddings: Vec<CycleEmbedding>,
    /// Per part: whether the part's semi-degree reaches the asymptotic
    /// guarantee threshold `ceil((3 ell - 1) / 8)`.
    pub guarantee_flags: Vec<bool>,
    /// Some split node fell short of its threshold or ran out of attempts.
    pub partition_degraded: bool,
}

/// Partition plus whatever embeddings were found before a failure.
#[derive(Debug, Clone)]
pub struct PartialFactor {
    pub partition: Partition,
    pub embeddings: Vec<Option<CycleEmbedding>>,
}

#[derive(Debug, Error)]
pub enum FactorFailure {
    #[error("part size {ell} does not divide graph order {n}")]
    Divisibility { n: usize, ell: usize },
    #[error("part size {0} below minimum cycle length 3")]
    PartSizeTooSmall(usize),
    #[error("expected {expected} patterns (one per part), got {got}")]
    PatternCount { expected: usize, got: usize },
    #[error("pattern {index} has length {got}, expected part size {expected}")]
    PatternLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("partition stage failed: {0}")]
    Partition(#[from] PartitionError),
    #[error("part {part}: no embedding exists for its pattern")]
    PartNotFound {
        part: usize,
        partial: Box<PartialFactor>,
    },
    #[error("part {part}: search budget exhausted after {expanded} expansions (inconclusive)")]
    PartBudgetExhausted {
        part: usize,
        expanded: u64,
        partial: Box<PartialFactor>,
    },
}

enum PartOutcome {
    Found(CycleEmbedding),
    NotFound,
    Budget(u64),
}

/// Runs the whole pipeline: recursive equipartition, then an exact search in
/// every part for that part's pattern. Parts are attempted in ascending
/// order of semi-degree so the hardest instances fail fast.
pub fn cycle_factor(
    g: &OrientedGraph,
    req: &FactorRequest,
) -> Result<FactorCertificate, FactorFailure> {
    if req.ell < 3 {
        return Err(FactorFailure::PartSizeTooSmall(req.ell));
    }
    if g.n() == 0 || !g.n().is_multiple_of(req.ell) {
        return Err(FactorFailure::Divisibility {
            n: g.n(),
            ell: req.ell,
        });
    }
    let m = g.n() / req.ell;
    let patterns: Vec<OrientationPattern> = match &req.patterns {
        None => vec![
            OrientationPattern::all_forward(req.ell).expect("ell >= 3");
            m
        ],
        Some(PatternSpec::Uniform(p)) => vec![p.clone(); m],
        Some(PatternSpec::PerPart(list)) => {
            if list.len() != m {
                return Err(FactorFailure::PatternCount {
                    expected: m,
                    got: list.len(),
                });
            }
            list.clone()
        }
    };
    for (index, p) in patterns.iter().enumerate() {
        if p.len() != req.ell {
            return Err(FactorFailure::PatternLength {
                index,
                expected: req.ell,
                got: p.len(),
            });
        }
    }

    let policy = if req.best_effort {
        SplitPolicy::BestEffort
    } else {
        SplitPolicy::Strict
    };
    let partition = recursive_equipartition(g, req.ell, req.mode, req.seed, req.max_attempts, policy)?;

    let parts: Vec<_> = partition
        .blocks
        .iter()
        .map(|block| g.induced(block))
        .collect();
    let semi_degrees: Vec<usize> = parts
        .iter()
        .map(|p| p.graph.min_degree(DegreeMode::Semi))
        .collect();
    let guarantee_flags: Vec<bool> = semi_degrees
        .iter()
        .map(|&d| d >= guarantee_threshold(req.ell))
        .collect();

    // hardest first
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (semi_degrees[i], i));

    let dp_cap = req.dp_cap.min(MAX_DP_VERTICES);
    let outcomes: Vec<(usize, PartOutcome)> = order
        .par_iter()
        .map(|&i| {
            let sub = &parts[i];
            let outcome = if req.ell <= dp_cap {
                match find_cycle_dp(&sub.graph, &patterns[i], dp_cap)
                    .expect("cap checked before dispatch")
                {
                    Some(emb) => PartOutcome::Found(emb),
                    None => PartOutcome::NotFound,
                }
            } else {
                match find_cycle_backtrack(&sub.graph, &patterns[i], req.budget) {
                    SearchOutcome::Found(emb) => PartOutcome::Found(emb),
                    SearchOutcome::NotFound => PartOutcome::NotFound,
                    SearchOutcome::BudgetExhausted { expanded } => PartOutcome::Budget(expanded),
                }
            };
            (i, outcome)
        })
        .collect();

    let mut embeddings: Vec<Option<CycleEmbedding>> = vec![None; m];
    let mut first_failure: Option<(usize, Option<u64>)> = None;
    for (i, outcome) in outcomes {
        match outcome {
            PartOutcome::Found(emb) => {
                // lift the part-local ids back to the original graph
                let vertices = emb
                    .vertices
                    .iter()
                    .map(|&v| parts[i].original_ids[v])
                    .collect();
                embeddings[i] = Some(CycleEmbedding {
                    vertices,
                    pattern: emb.pattern,
                });
            }
            PartOutcome::NotFound if first_failure.is_none() => {
                first_failure = Some((i, None));
            }
            PartOutcome::Budget(expanded) if first_failure.is_none() => {
                first_failure = Some((i, Some(expanded)));
            }
            _ => {}
        }
    }

    if let Some((part, budget)) = first_failure {
        let partial = Box::new(PartialFactor {
            partition,
            embeddings,
        });
        return Err(match budget {
            None => FactorFailure::PartNotFound { part, partial },
            Some(expanded) => FactorFailure::PartBudgetExhausted {
                part,
                expanded,
                partial,
            },
        });
    }

    let partition_degraded = partition.best_effort_used() || partition.below_threshold();
    Ok(FactorCertificate {
        partition,
        embeddings: embeddings.into_iter().map(Option::unwrap).collect(),
        guarantee_flags,
        partition_degraded,
    })
}

/// Independent recheck of a certificate against the graph it claims to tile.
#[derive(Debug, Clone, Serialize)]
pub struct FactorVerdict {
    pub tiling_ok: bool,
    pub blocks_match_embeddings: bool,
    pub embeddings_ok: bool,
    pub failures: Vec<String>,
}

impl FactorVerdict {
    pub fn ok(&self) -> bool {
        self.tiling_ok && self.blocks_match_embeddings && self.embeddings_ok
    }
}

/// Rechecks that the blocks tile `V(g)`, each embedding's vertex set equals
/// its block, and every embedding realizes its pattern edge-by-edge in `g`.
pub fn verify_factor(g: &OrientedGraph, cert: &FactorCertificate) -> FactorVerdict {
    let mut failures = Vec::new();
    let p = &cert.partition;

    let mut seen = vec![0usize; g.n()];
    let mut tiling_ok = p.blocks.iter().all(|b| b.len() == p.part_size);
    if !tiling_ok {
        failures.push("block sizes differ from part_size".into());
    }
    for block in &p.blocks {
        for &v in block {
            if v >= g.n() {
                tiling_ok = false;
                failures.push(format!("vertex {v} out of range"));
            } else {
                seen[v] += 1;
            }
        }
    }
    if seen.iter().any(|&c| c != 1) {
        tiling_ok = false;
        failures.push("blocks do not tile the vertex set exactly once".into());
    }

    let mut blocks_match_embeddings = cert.embeddings.len() == p.blocks.len();
    if !blocks_match_embeddings {
        failures.push(format!(
            "{} embeddings for {} blocks",
            cert.embeddings.len(),
            p.blocks.len()
        ));
    }
    for (i, (emb, block)) in cert.embeddings.iter().zip(&p.blocks).enumerate() {
        let mut a: Vec<VertexId> = emb.vertices.clone();
        a.sort_unstable();
        let mut b = block.clone();
        b.sort_unstable();
        if a != b {
            blocks_match_embeddings = false;
            failures.push(format!("embedding {i} does not use exactly block {i}"));
        }
    }

    let mut embeddings_ok = true;
    for (i, emb) in cert.embeddings.iter().enumerate() {
        let v = verify_embedding(g, emb);
        if !v.ok {
            embeddings_ok = false;
            failures.push(format!("embedding {i} invalid: {:?}", v.first_failure));
        }
    }

    FactorVerdict {
        tiling_ok,
        blocks_match_embeddings,
        embeddings_ok,
        failures,
    }
}

/// How the graph compares against the factor threshold machinery for a given
/// epsilon: the relative semi-degree against `3/8 + eps`, the part-size
/// floor `20^3 eps^-3` (the asymptotic constant `n0` stays symbolic), and
/// whether `3/8 + eps - 10 ell^(-1/3) >= 3/8 + eps/2` holds at this `ell`.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub semi_degree: usize,
    pub relative_semi_degree: f64,
    pub eps: f64,
    pub required_relative: f64,
    pub meets_required: bool,
    pub ell: usize,
    pub ell0_epsilon_term: f64,
    pub ell_reaches_epsilon_term: bool,
    pub ell0_note: &'static str,
    pub per_part_bound: f64,
    pub per_part_target: f64,
    pub per_part_inequality_holds: bool,
}

pub fn threshold_report(g: &OrientedGraph, ell: usize, eps: f64) -> ThresholdReport {
    let relative = g.min_relative_degree(DegreeMode::Semi);
    let required = 3.0 / 8.0 + eps;
    let ell0_epsilon_term = 8000.0 * eps.powi(-3);
    let per_part_bound = 3.0 / 8.0 + eps - 10.0 / (ell as f64).cbrt();
    let per_part_target = 3.0 / 8.0 + eps / 2.0;
    ThresholdReport {
        n: g.n(),
        semi_degree: g.min_degree(DegreeMode::Semi),
        relative_semi_degree: relative,
        eps,
        required_relative: required,
        meets_required: relative >= required,
        ell,
        ell0_epsilon_term,
        ell_reaches_epsilon_term: ell as f64 >= ell0_epsilon_term,
        ell0_note: "part-size floor is max(20^3 eps^-3, n0) with n0 asymptotic, unspecified",
        per_part_bound,
        per_part_target,
        per_part_inequality_holds: per_part_bound >= per_part_target,
    }
}
