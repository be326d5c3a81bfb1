use proptest::prelude::*;

use regraph_core::congestion::vertex_congestion;
use regraph_core::generate::{complete_graph, cycle_graph, random_regular, GenSpec};
use regraph_core::hyperbolicity::four_point_defect;
use regraph_core::paths::distance_matrix;
use regraph_core::{read_edge_list, write_edge_list, Graph};

/// Arbitrary simple graph on up to 14 vertices.
fn graph() -> impl Strategy<Value = Graph> {
    (1usize..14).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
            let mut edges: Vec<(usize, usize)> = pairs
                .into_iter()
                .filter(|(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            Graph::build(n, &edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn handshake(g in graph()) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trip(g in graph()) {
        let back = read_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn generated_graphs_round_trip(half in 3usize..20, d in 1usize..5, seed in any::<u64>()) {
        let n = 2 * half;
        let g = random_regular(&GenSpec { require_connected: false, ..GenSpec::new(n, d, seed) }).unwrap();
        prop_assert_eq!(g.regular_degree(), Some(d));
        prop_assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn congestion_conserves_flow(g in graph()) {
        let r = vertex_congestion(&g);
        let expected = r.pair_length_total as f64 + r.total_demand as f64;
        prop_assert!((r.total_flow() - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn four_point_defect_is_symmetric(g in graph(), q in proptest::array::uniform4(0usize..14)) {
        let n = g.n();
        let dm = distance_matrix(&g).unwrap();
        let [a, b, c, d] = q.map(|x| x % n);
        let all_connected = [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)]
            .iter()
            .all(|&(x, y)| dm.get(x, y).is_some());
        prop_assume!(all_connected);
        let base = four_point_defect(&dm, a, b, c, d).unwrap();
        for (w, x, y, z) in [(b, a, c, d), (c, d, a, b), (d, c, b, a), (a, c, b, d), (a, d, c, b)] {
            prop_assert_eq!(four_point_defect(&dm, w, x, y, z).unwrap(), base);
        }
    }

    #[test]
    fn vertex_transitive_graphs_have_uniform_flow(n in 3usize..40, complete in any::<bool>()) {
        let g = if complete { complete_graph(n.min(20)).unwrap() } else { cycle_graph(n).unwrap() };
        let r = vertex_congestion(&g);
        for f in &r.flows {
            prop_assert!((f - r.flows[0]).abs() <= 1e-9);
        }
    }
}
