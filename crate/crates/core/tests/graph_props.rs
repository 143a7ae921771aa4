//! Invariants of the graph type and the seeded generators.

use oritile_core::generate::{random_oriented, random_tournament};
use oritile_core::graph::{DegreeMode, OrientedGraph};
use proptest::prelude::*;

/// Brute-force minimum degree straight off the edge list restricted to `w`.
fn brute_min_degree(g: &OrientedGraph, w: &[usize], mode: DegreeMode) -> usize {
    w.iter()
        .map(|&v| {
            let out = w.iter().filter(|&&u| u != v && g.has_edge(v, u)).count();
            let inn = w.iter().filter(|&&u| u != v && g.has_edge(u, v)).count();
            match mode {
                DegreeMode::Semi => out.min(inn),
                DegreeMode::Total => out + inn,
            }
        })
        .min()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_oriented(n in 0usize..40, seed in any::<u64>(), p in 0.0f64..=1.0) {
        let g = random_oriented(n, p, seed).unwrap();
        for u in 0..n {
            prop_assert!(!g.has_edge(u, u));
            for v in 0..n {
                prop_assert!(!(g.has_edge(u, v) && g.has_edge(v, u)));
            }
        }
    }

    #[test]
    fn semi_at_most_half_total(n in 1usize..40, seed in any::<u64>(), p in 0.0f64..=1.0) {
        let g = random_oriented(n, p, seed).unwrap();
        prop_assert!(g.min_degree(DegreeMode::Semi) <= g.min_degree(DegreeMode::Total) / 2);
    }

    #[test]
    fn same_seed_same_edges(n in 0usize..30, seed in any::<u64>()) {
        let a = random_tournament(n, seed);
        let b = random_tournament(n, seed);
        prop_assert_eq!(a.edges(), b.edges());
    }
}

#[test]
fn induced_min_degree_matches_brute_force() {
    for seed in 0..100u64 {
        let n = 6 + (seed as usize % 15);
        let g = random_oriented(n, 0.6, seed).unwrap();
        // every other vertex, at most 12
        let w: Vec<usize> = (0..n).step_by(2).take(12).collect();
        let sub = g.induced(&w);
        for mode in [DegreeMode::Semi, DegreeMode::Total] {
            assert_eq!(
                sub.graph.min_degree(mode),
                brute_min_degree(&g, &w, mode),
                "seed {seed}, mode {mode:?}"
            );
        }
    }
}
