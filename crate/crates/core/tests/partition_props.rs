//! Partition invariants: structure, threshold honesty, bound arithmetic, and
//! the Las Vegas attempts contract.

use oritile_core::generate::random_tournament;
use oritile_core::graph::{DegreeMode, OrientedGraph};
use oritile_core::partition::{
    recursive_equipartition, simplified_bound, theoretical_bound, verify_partition, SplitPolicy,
    SplitReport,
};

fn brute_min_degree(g: &OrientedGraph, side: &[usize], mode: DegreeMode) -> usize {
    side.iter()
        .map(|&v| {
            let out = side.iter().filter(|&&u| u != v && g.has_edge(v, u)).count();
            let inn = side.iter().filter(|&&u| u != v && g.has_edge(u, v)).count();
            match mode {
                DegreeMode::Semi => out.min(inn),
                DegreeMode::Total => out + inn,
            }
        })
        .min()
        .unwrap_or(0)
}

fn brute_min_relative_degree(g: &OrientedGraph, side: &[usize], mode: DegreeMode) -> f64 {
    brute_min_degree(g, side, mode) as f64 / side.len() as f64
}

/// Recompute a report's numbers from scratch; they must match bit-for-bit.
fn check_report_honesty(g: &OrientedGraph, r: &SplitReport) {
    let node: Vec<usize> = r.left.iter().chain(r.right.iter()).copied().collect();
    let n = node.len();
    let delta = brute_min_degree(g, &node, r.mode) as f64 / n as f64;
    let threshold = (delta - 2.0 / (n as f64).cbrt()).max(0.0);
    assert_eq!(r.threshold.n, n);
    assert_eq!(r.threshold.delta, delta);
    assert_eq!(r.threshold.value, threshold);
    assert_eq!(r.achieved_left, brute_min_relative_degree(g, &r.left, r.mode));
    assert_eq!(r.achieved_right, brute_min_relative_degree(g, &r.right, r.mode));
    assert!(r.achieved_left >= r.threshold.value);
    assert!(r.achieved_right >= r.threshold.value);
}

#[test]
fn equipartition_structure_and_honesty() {
    for seed in 0..10u64 {
        let g = random_tournament(256, seed);
        let p = recursive_equipartition(&g, 32, DegreeMode::Semi, seed, 100, SplitPolicy::Strict)
            .unwrap();
        assert_eq!(p.blocks.len(), 8);
        assert!(p.blocks.iter().all(|b| b.len() == 32));
        let verdict = verify_partition(&g, &p, DegreeMode::Semi);
        assert!(verdict.structural_ok(), "{:?}", verdict.failures);
        assert_eq!(p.reports.len(), 7);
        for r in &p.reports {
            check_report_honesty(&g, r);
        }
    }
}

#[test]
fn total_mode_partitions_too() {
    let g = random_tournament(128, 3);
    let p = recursive_equipartition(&g, 32, DegreeMode::Total, 9, 100, SplitPolicy::Strict)
        .unwrap();
    assert!(verify_partition(&g, &p, DegreeMode::Total).structural_ok());
    for r in &p.reports {
        check_report_honesty(&g, r);
    }
}

#[test]
fn bound_monotone_in_depth_and_dominates_simplified() {
    for &ell in &[8usize, 64, 512, 1_000_000] {
        for &delta in &[0.0, 0.25, 0.375, 0.5] {
            let simple = simplified_bound(delta, ell);
            let mut prev = theoretical_bound(delta, ell, 0);
            assert_eq!(prev, delta);
            for k in 1..=64u32 {
                let cur = theoretical_bound(delta, ell, k);
                assert!(cur <= prev + 1e-12, "not non-increasing at k={k}");
                assert!(
                    cur >= simple - 1e-12,
                    "simplified bound not dominated: ell={ell} delta={delta} k={k}"
                );
                prev = cur;
            }
        }
    }
}

#[test]
fn bound_telescopes_per_level_costs() {
    // applying one split cost 2 * (current n)^(-1/3) per level, with the
    // current order lower-bounded by 2^(k-1-level) * ell, reproduces the
    // partial geometric sum exactly
    for k in 1..=10u32 {
        for &ell in &[8usize, 64, 512] {
            for &delta in &[0.25, 0.375, 0.5] {
                let mut remaining = delta;
                for level in 0..k {
                    let order = (1u64 << (k - 1 - level)) as f64 * ell as f64;
                    remaining -= 2.0 / order.cbrt();
                }
                let direct = theoretical_bound(delta, ell, k);
                assert!(
                    (remaining - direct).abs() < 1e-9,
                    "telescoping mismatch at k={k} ell={ell}: {remaining} vs {direct}"
                );
            }
        }
    }
}

#[test]
fn las_vegas_mean_attempts_below_two() {
    let g = random_tournament(1024, 9);
    let mut attempts = 0usize;
    let mut nodes = 0usize;
    for seed in 0..200u64 {
        let p = recursive_equipartition(&g, 256, DegreeMode::Semi, seed, 100, SplitPolicy::Strict)
            .unwrap();
        for r in &p.reports {
            attempts += r.attempts;
            nodes += 1;
        }
    }
    let mean = attempts as f64 / nodes as f64;
    assert!(mean < 2.0, "mean attempts {mean} over {nodes} nodes");
}

#[test]
fn partition_serializes_with_stable_fields() {
    let g = random_tournament(32, 1);
    let p = recursive_equipartition(&g, 8, DegreeMode::Semi, 2, 100, SplitPolicy::Strict).unwrap();
    let a = serde_json::to_string(&p).unwrap();
    let b = serde_json::to_string(&p).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"blocks\""));
    assert!(a.contains("\"bound_claimed\""));
}
