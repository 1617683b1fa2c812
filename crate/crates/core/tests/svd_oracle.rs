mod common;

use common::gaussian_matrix;
use nalgebra::{DMatrix, DVector};
use progle_core::svd::{scale_embedding, thin_svd_dense, truncated_svd, SvdOptions};
use progle_core::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sparse(n: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                triplets.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).unwrap()
}

fn dense_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let gram = q.tr_mul(q);
    (gram - DMatrix::identity(q.ncols(), q.ncols())).amax()
}

#[test]
fn matches_dense_svd_on_random_sparse_matrices() {
    let d = 10;
    for seed in 0..20 {
        let m = random_sparse(80, 0.05, seed);
        let dense = m.to_dense();
        let oracle = dense_singular_values(&dense);
        let svd = truncated_svd(&m, d, &SvdOptions::default()).unwrap();
        for k in 0..d {
            let rel = (svd.singular_values[k] - oracle[k]).abs() / oracle[k];
            assert!(rel <= 1e-8, "seed {seed} σ_{k}: {} vs {}", svd.singular_values[k], oracle[k]);
        }
        assert!(orthonormality_error(&svd.u) <= 1e-8);
        assert!(orthonormality_error(&svd.v) <= 1e-8);

        let residuals = &dense * &svd.v - &svd.u * DMatrix::from_diagonal(&svd.singular_values);
        for col in residuals.column_iter() {
            assert!(col.norm() <= 1e-8 * svd.singular_values[0]);
        }

        // Eckart–Young: the rank-d residual equals the tail energy
        let approx = &svd.u * DMatrix::from_diagonal(&svd.singular_values) * svd.v.transpose();
        let achieved = (&dense - approx).norm();
        let optimal = oracle[d..].iter().map(|s| s * s).sum::<f64>().sqrt();
        assert!((achieved - optimal).abs() <= 1e-6 * optimal, "seed {seed}: {achieved} vs {optimal}");
    }
}

#[test]
fn block_iteration_matches_dense_svd() {
    // ranks of 16 and more run the block recurrence
    for (seed, d) in [(100, 16), (101, 24), (102, 40)] {
        let m = random_sparse(300, 0.03, seed);
        let dense = m.to_dense();
        let oracle = dense_singular_values(&dense);
        let svd = truncated_svd(&m, d, &SvdOptions::default()).unwrap();
        for k in 0..d {
            let rel = (svd.singular_values[k] - oracle[k]).abs() / oracle[k];
            assert!(rel <= 1e-8, "seed {seed} σ_{k}: {} vs {}", svd.singular_values[k], oracle[k]);
        }
        assert!(orthonormality_error(&svd.u) <= 1e-8);
        assert!(orthonormality_error(&svd.v) <= 1e-8);
        let residuals = &dense * &svd.v - &svd.u * DMatrix::from_diagonal(&svd.singular_values);
        for col in residuals.column_iter() {
            assert!(col.norm() <= 1e-8 * svd.singular_values[0]);
        }
    }
}

#[test]
fn rectangular_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let triplets: Vec<_> = (0..600)
        .map(|_| (rng.random_range(0..120), rng.random_range(0..45), rng.random_range(-1.0..1.0)))
        .collect();
    let m = SparseMatrix::from_triplets(120, 45, &triplets).unwrap();
    let oracle = dense_singular_values(&m.to_dense());
    let svd = truncated_svd(&m, 6, &SvdOptions::default()).unwrap();
    for k in 0..6 {
        assert!((svd.singular_values[k] - oracle[k]).abs() <= 1e-8 * oracle[k]);
    }
    let t = m.transpose();
    let svd_t = truncated_svd(&t, 6, &SvdOptions::default()).unwrap();
    for k in 0..6 {
        assert!((svd_t.singular_values[k] - oracle[k]).abs() <= 1e-8 * oracle[k]);
    }
}

#[test]
fn degenerate_spectrum_spans_the_right_subspace() {
    // singular values 5, 2, 2, 2, 1, …: any basis of the σ = 2 block is acceptable
    let n = 30;
    let q = gaussian_matrix(n, n, 11).qr().q();
    let mut sigma = vec![1.0 / n as f64; n];
    sigma[0] = 5.0;
    sigma[1..4].fill(2.0);
    let dense = &q * DMatrix::from_diagonal(&DVector::from_vec(sigma)) * q.transpose();
    let triplets: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, dense[(i, j)]))
        .collect();
    let m = SparseMatrix::from_triplets(n, n, &triplets).unwrap();
    let svd = truncated_svd(&m, 4, &SvdOptions::default()).unwrap();
    let projector = |basis: DMatrix<f64>| &basis * basis.transpose();
    let got = projector(svd.u.columns(0, 4).into_owned());
    let expected = projector(q.columns(0, 4).into_owned());
    assert!((got - expected).amax() < 1e-8);
}

#[test]
fn thin_svd_reconstructs_random_blocks() {
    let x = gaussian_matrix(200, 16, 3);
    let svd = thin_svd_dense(&x).unwrap();
    let rebuilt = &svd.u * DMatrix::from_diagonal(&svd.singular_values) * svd.v.transpose();
    assert!((rebuilt - &x).norm() <= 1e-10 * x.norm());
    assert!(orthonormality_error(&svd.u) <= 1e-10);
    assert!(svd.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn scaled_factors_reproduce_the_product() {
    let m = random_sparse(60, 0.1, 9);
    let svd = truncated_svd(&m, 5, &SvdOptions::default()).unwrap();
    let r = scale_embedding(&svd.u, &svd.singular_values).unwrap().vectors;
    let c = scale_embedding(&svd.v, &svd.singular_values).unwrap().vectors;
    let direct = &svd.u * DMatrix::from_diagonal(&svd.singular_values) * svd.v.transpose();
    assert!((r * c.transpose() - direct).amax() < 1e-12);
}
