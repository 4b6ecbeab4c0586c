mod common;

use chordsos::graph::{clique_cover, SparsityGraph};
use common::{is_complete_in, random_chordal, random_graph, rng};
use proptest::prelude::*;

#[test]
fn four_cycle_extension_adds_one_chord() {
    let g = SparsityGraph::from_one_based(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
    assert!(g.is_chordal().is_none());
    let (ext, peo) = g.chordal_extension();
    assert_eq!(ext.num_edges(), 5);
    assert!(ext.verify_peo(&peo));
    assert_eq!(ext.maximal_cliques(&peo).unwrap().len(), 2);
}

#[test]
fn star_has_leaf_cliques() {
    let g = SparsityGraph::from_one_based(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
    let cl = clique_cover(&g);
    assert_eq!(cl.len(), 4);
    assert!(cl.iter().all(|c| c.len() == 2 && c.contains(0)));
    assert_eq!(g.simplicial_vertices(), vec![1, 2, 3, 4]);
}

proptest! {
    #[test]
    fn chordal_graphs_are_recognized(seed in any::<u64>(), m in 1usize..16) {
        let g = random_chordal(m, &mut rng(seed));
        let peo = g.is_chordal().expect("generator output is chordal");
        prop_assert!(g.verify_peo(&peo));
        let cl = g.maximal_cliques(&peo).unwrap();
        prop_assert!(cl.len() <= m);
        prop_assert!(g.covered_by(&cl));
        for c in &cl {
            prop_assert!(is_complete_in(&g, c));
        }
        for (i, a) in cl.iter().enumerate() {
            for b in &cl[i + 1..] {
                prop_assert!(!a.vertices().iter().all(|v| b.contains(*v)));
                prop_assert!(!b.vertices().iter().all(|v| a.contains(*v)));
            }
        }
    }

    #[test]
    fn chordal_graphs_have_simplicial_vertices(seed in any::<u64>(), m in 1usize..16) {
        let g = random_chordal(m, &mut rng(seed));
        let s = g.simplicial_vertices();
        prop_assert!(!s.is_empty());
        if m >= 2 && g.num_edges() < m * (m - 1) / 2 {
            prop_assert!(s.len() >= 2);
        }
    }

    #[test]
    fn removing_a_vertex_keeps_chordality(seed in any::<u64>(), m in 2usize..16, pick in any::<prop::sample::Index>()) {
        let g = random_chordal(m, &mut rng(seed));
        let v = pick.index(m);
        let h = g.remove_vertex(v).unwrap();
        prop_assert_eq!(h.order(), m - 1);
        prop_assert_eq!(h.num_edges(), g.num_edges() - g.degree(v));
        prop_assert!(h.is_chordal().is_some());
    }

    #[test]
    fn extension_contains_graph_and_is_chordal(seed in any::<u64>(), m in 1usize..14, p in 0.0f64..0.7) {
        let g = random_graph(m, p, &mut rng(seed));
        let (ext, peo) = g.chordal_extension();
        prop_assert!(ext.verify_peo(&peo));
        for (a, b) in g.edges() {
            prop_assert!(ext.has_edge(a, b));
        }
        if g.is_chordal().is_some() {
            prop_assert_eq!(ext.edges(), g.edges());
        }
        prop_assert!(g.covered_by(&clique_cover(&g)));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), m in 1usize..12) {
        let g = random_graph(m, 0.4, &mut rng(seed));
        prop_assert_eq!(SparsityGraph::from_json(&g.to_json()).unwrap(), g);
    }
}
