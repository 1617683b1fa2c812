mod common;

use common::{dense_adjacency, dense_proximity, random_graph};
use nalgebra::DMatrix;
use progle_core::proximity::{build_proximity, dropout_adjacency};
use progle_core::SparseGraph;
use proptest::prelude::*;

fn assert_matches_dense(g: &SparseGraph, order: usize, eta: f64, seed: u64) {
    let sparse = build_proximity(g, order, eta, seed).unwrap().matrix;
    let dense = dense_proximity(g, order, eta, seed);
    let n = g.node_count();
    for i in 0..n {
        for j in 0..n {
            let got = sparse.get(i, j);
            assert!(
                (got - dense[(i, j)]).abs() <= 1e-10,
                "({i},{j}) sparse {got} dense {} order {order} eta {eta}",
                dense[(i, j)]
            );
        }
    }
    // nothing stored outside the dense support
    for (i, j, _) in sparse.iter() {
        assert!(dense[(i, j)] > 0.0);
    }
}

#[test]
fn matches_dense_reference_on_random_graphs() {
    let orders = [1, 2, 3];
    let etas = [0.0, 0.3, 0.7];
    for case in 0..20u64 {
        let n = 20 + (case as usize * 37) % 81;
        let p = [0.05, 0.1, 0.2][case as usize % 3];
        let g = random_graph(n, p, 1000 + case);
        let order = orders[case as usize % 3];
        let eta = etas[(case as usize / 3) % 3];
        assert_matches_dense(&g, order, eta, 7 * case + 1);
    }
}

#[test]
fn every_order_and_dropout_combination() {
    let g = random_graph(40, 0.12, 5);
    for order in 1..=3 {
        for eta in [0.0, 0.3, 0.7] {
            assert_matches_dense(&g, order, eta, 99);
        }
    }
}

#[test]
fn complete_graph_dropout_is_binomial() {
    let n = 100;
    let edges: Vec<_> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0)))
        .collect();
    let g = SparseGraph::from_edges(n, &edges).unwrap();
    let total = 4950.0;
    let sd = (total * 0.25f64).sqrt();
    for seed in 0..5 {
        let kept = dropout_adjacency(&g, 0.5, seed).unwrap().nnz() as f64 / 2.0;
        assert!((kept - 0.5 * total).abs() <= 4.0 * sd, "kept {kept}");
    }
}

#[test]
fn higher_dropout_is_sparser_on_average() {
    let g = random_graph(80, 0.08, 3);
    for order in [2, 3] {
        let mean_nnz = |eta: f64| {
            (0..30)
                .map(|s| build_proximity(&g, order, eta, s).unwrap().nnz() as f64)
                .sum::<f64>()
                / 30.0
        };
        assert!(mean_nnz(0.8) <= mean_nnz(0.2));
    }
}

fn hop_reach(a: &DMatrix<f64>, order: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let step = a.map(|v| if v != 0.0 { 1.0 } else { 0.0 });
    let mut power = DMatrix::identity(n, n);
    let mut reach = DMatrix::zeros(n, n);
    for _ in 0..order {
        power = (&power * &step).map(|v| if v != 0.0 { 1.0 } else { 0.0 });
        reach += &power;
    }
    reach
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rows_are_stochastic_and_local(
        n in 5usize..40,
        p in 0.05f64..0.4,
        order in 1usize..=3,
        eta in 0.0f64..0.95,
        graph_seed in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, p, graph_seed);
        let prox = build_proximity(&g, order, eta, seed).unwrap().matrix;
        let reach = hop_reach(&dense_adjacency(&g), order);
        for (r, sum) in prox.row_sums().into_iter().enumerate() {
            if g.degree()[r] > 0.0 {
                prop_assert!((sum - 1.0).abs() <= 1e-10);
            } else {
                prop_assert_eq!(sum, 0.0);
            }
        }
        for (i, j, v) in prox.iter() {
            prop_assert!(v > 0.0);
            prop_assert!(reach[(i, j)] > 0.0, "({}, {}) beyond {} hops", i, j, order);
        }
    }

    #[test]
    fn dropout_keeps_symmetry_and_weights(
        n in 3usize..30,
        eta in 0.0f64..0.99,
        graph_seed in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let g = random_graph(n, 0.3, graph_seed);
        let dropped = dropout_adjacency(&g, eta, seed).unwrap();
        prop_assert_eq!(&dropped, &dropout_adjacency(&g, eta, seed).unwrap());
        let t = dropped.transpose();
        prop_assert_eq!(&dropped, &t);
        for (i, j, v) in dropped.iter() {
            prop_assert_eq!(v, g.adjacency().get(i, j));
        }
    }
}
