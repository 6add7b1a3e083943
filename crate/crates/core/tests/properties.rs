mod common;

use std::collections::BTreeMap;

use num::BigUint;
use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use sgm_core::feynman::{graph_sum_forward, FeynmanAssignment};
use sgm_core::poset::contract_edges;
use sgm_core::rational::{rat, Rational};
use sgm_core::{contract, enumerate, stable_pairs, CatalogCache, StableGraph};

use common::*;

fn catalog_graphs(max_grade: u32) -> Vec<StableGraph> {
    stable_pairs(max_grade)
        .into_iter()
        .flat_map(|(g, n)| enumerate(g, n).unwrap().graphs().to_vec())
        .collect()
}

/// Contracts `edges` (original indices) one at a time in the given order.
fn contract_sequentially(graph: &StableGraph, edges: &[usize]) -> StableGraph {
    let mut current = graph.clone();
    let mut alive: Vec<usize> = (0..graph.num_edges()).collect();
    for e in edges {
        let pos = alive.iter().position(|x| x == e).unwrap();
        current = contract(&current, pos).unwrap();
        alive.remove(pos);
    }
    current
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn aut_order_matches_half_edge_brute_force(graph in arb_connected_graph(4, 8)) {
        prop_assert_eq!(graph.aut_order().unwrap(), BigUint::from(brute_aut(&graph)));
    }

    #[test]
    fn key_invariant_under_relabeling(graph in arb_connected_graph(5, 10), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..graph.num_vertices()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(relabel(&graph, &order).canonical_key(), graph.canonical_key());
    }

    #[test]
    fn key_equality_is_isomorphism(a in arb_connected_graph(3, 8), b in arb_connected_graph(3, 8)) {
        prop_assert_eq!(a.canonical_key() == b.canonical_key(), brute_isomorphic(&a, &b));
    }

    #[test]
    fn contraction_order_does_not_matter(
        (graph, subset, flip) in select(catalog_graphs(4)).prop_flat_map(|gr| {
            let ne = gr.num_edges();
            (Just(gr), subsequence((0..ne).collect::<Vec<_>>(), 0..=ne), any::<bool>())
        })
    ) {
        let together = contract_edges(&graph, &subset).unwrap();
        let mut order = subset.clone();
        if flip {
            order.reverse();
        }
        let forward = contract_sequentially(&graph, &subset);
        let backward = contract_sequentially(&graph, &order);
        prop_assert!(brute_isomorphic(&together, &forward));
        prop_assert!(brute_isomorphic(&together, &backward));
        prop_assert_eq!(together.genus(), graph.genus());
        prop_assert_eq!(together.num_legs(), graph.num_legs());
        prop_assert!(together.is_stable());
    }

    #[test]
    fn evaluation_commutes_with_graph_sum(
        values in prop::collection::vec((-9i64..10, 1i64..6), 9),
        kappa in (-5i64..6, 1i64..4),
    ) {
        let cache = CatalogCache::new();
        let pairs = stable_pairs(3);
        let map: BTreeMap<(u32, u32), Rational> =
            pairs.iter().zip(&values).map(|(&p, &(a, b))| (p, rat(a, b))).collect();
        let assignment = FeynmanAssignment::new(map, rat(kappa.0, kappa.1));
        for &(g, n) in &pairs {
            let catalog = cache.catalog(g, n).unwrap();
            let summed = graph_sum_forward(&catalog).evaluate(&assignment).unwrap();
            // evaluate each weight first, then sum
            let mut direct = Rational::from_integer(0.into());
            for (i, graph) in catalog.graphs().iter().enumerate() {
                let mut w = num::pow(assignment.kappa.clone(), graph.num_edges());
                for v in 0..graph.num_vertices() {
                    w *= assignment.value(graph.vertices()[v].genus, graph.valence(v)).unwrap();
                }
                direct += w / Rational::from_integer(catalog.aut(i).clone().into());
            }
            direct *= sgm_core::rational::factorial_q(n);
            prop_assert_eq!(summed, direct);
        }
    }
}
