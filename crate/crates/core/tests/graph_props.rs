mod common;

use common::{laplacian_spectrum, random_graph};
use nalgebra::DMatrix;
use progle_core::graph::{load_edge_list, read_edge_list, save_edge_list};
use progle_core::{Error, NodeIdMap, SparseGraph};
use proptest::prelude::*;

#[test]
fn laplacian_agrees_with_spectral_oracle() {
    let g = random_graph(40, 0.15, 3);
    let spectrum = laplacian_spectrum(&g);
    let identity = spectrum.function(|l| l);
    assert!((g.rw_laplacian().to_dense() - identity).amax() < 1e-12);
}

#[test]
fn file_round_trip_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let text = "# comment\nalice bob\nbob carol 2.5\ncarol alice\ndave alice\n";
    let input = dir.path().join("in.txt");
    std::fs::write(&input, text).unwrap();
    let (g, ids) = load_edge_list(&input, true).unwrap();
    assert_eq!(ids.labels(), ["alice", "bob", "carol", "dave"]);
    assert_eq!(g.adjacency().get(1, 2), 2.5);

    let sidecar = dir.path().join("ids.txt");
    ids.save(&sidecar).unwrap();
    assert_eq!(NodeIdMap::load(&sidecar).unwrap(), ids);

    let out = dir.path().join("out.txt");
    save_edge_list(&g, &out).unwrap();
    let (back, back_ids) = load_edge_list(&out, true).unwrap();
    assert_eq!(back, g);
    assert_eq!(back_ids, NodeIdMap::identity(4));
}

#[test]
fn parse_errors_carry_line_numbers() {
    match read_edge_list("1 2\n3\n".as_bytes(), false) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    match read_edge_list("1 2\n2 3 x\n".as_bytes(), true) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(read_edge_list("1 2 -1\n".as_bytes(), true), Err(Error::Validation(_))));
}

#[test]
fn isolated_nodes_survive_a_round_trip() {
    let g = SparseGraph::from_edges(6, &[(0, 1, 1.0), (3, 4, 1.0)]).unwrap();
    let mut buf = Vec::new();
    progle_core::graph::write_edge_list(&g, &mut buf).unwrap();
    let (back, _) = read_edge_list(buf.as_slice(), false).unwrap();
    assert_eq!(back.node_count(), 6);
    assert_eq!(back, g);
}

fn arbitrary_graph() -> impl Strategy<Value = SparseGraph> {
    (2usize..25).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0.1f64..10.0), 0..60).prop_map(move |raw| {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v, _)| u != v).collect();
            SparseGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_spectrum_lies_in_zero_two(g in arbitrary_graph()) {
        for lambda in laplacian_spectrum(&g).eigenvalues {
            prop_assert!((-1e-10..=2.0 + 1e-10).contains(&lambda));
        }
    }

    #[test]
    fn transition_rows_are_stochastic(g in arbitrary_graph()) {
        let p = g.transition_matrix();
        for (r, s) in p.row_sums().into_iter().enumerate() {
            if g.degree()[r] > 0.0 {
                prop_assert!((s - 1.0).abs() < 1e-12);
            } else {
                prop_assert_eq!(s, 0.0);
            }
        }
        let l = g.rw_laplacian().to_dense();
        let expected = DMatrix::identity(g.node_count(), g.node_count()) - p.to_dense();
        prop_assert!((l - expected).amax() < 1e-15);
    }

    #[test]
    fn save_load_round_trip(g in arbitrary_graph()) {
        let mut buf = Vec::new();
        progle_core::graph::write_edge_list(&g, &mut buf).unwrap();
        let (back, ids) = read_edge_list(buf.as_slice(), true).unwrap();
        prop_assert_eq!(back, g.clone());
        prop_assert_eq!(ids, NodeIdMap::identity(g.node_count()));
    }
}
