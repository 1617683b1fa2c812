//! Dense reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use progle_core::proximity::{dropout_adjacency, dropout_seed};
use progle_core::SparseGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi graph with edge weights drawn from [0.5, 2).
pub fn random_graph(n: usize, p: f64, seed: u64) -> SparseGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, rng.random_range(0.5..2.0)));
            }
        }
    }
    SparseGraph::from_edges(n, &edges).unwrap()
}

pub fn path_graph(n: usize) -> SparseGraph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    SparseGraph::from_edges(n, &edges).unwrap()
}

/// Two disjoint cliques of size `k` each.
pub fn two_cliques(k: usize) -> SparseGraph {
    let mut edges = Vec::new();
    for offset in [0, k] {
        for u in 0..k {
            for v in (u + 1)..k {
                edges.push((offset + u, offset + v, 1.0));
            }
        }
    }
    SparseGraph::from_edges(2 * k, &edges).unwrap()
}

pub fn dense_adjacency(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (u, v, w) in g.edges() {
        a[(u, v)] += w;
        a[(v, u)] += w;
    }
    a
}

pub fn dense_transition(g: &SparseGraph) -> DMatrix<f64> {
    let mut p = dense_adjacency(g);
    for mut row in p.row_iter_mut() {
        let s: f64 = row.sum();
        if s > 0.0 {
            row /= s;
        }
    }
    p
}

fn support(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.map(|v| if v != 0.0 { 1.0 } else { 0.0 })
}

/// Σ_i (D⁻¹A)^i ∘ ⟨A Â_1 ⋯ Â_{i−1}⟩, row-normalized, evaluated with dense products.
pub fn dense_proximity(g: &SparseGraph, order: usize, eta: f64, seed: u64) -> DMatrix<f64> {
    let a = dense_adjacency(g);
    let p = dense_transition(g);
    let mut chain = a.clone();
    let mut power = p.clone();
    let mut total = p.component_mul(&support(&chain));
    for i in 2..=order {
        let dropped = dropout_adjacency(g, eta, dropout_seed(seed, i - 1)).unwrap().to_dense();
        chain = &chain * &dropped;
        power = &power * &p;
        total += power.component_mul(&support(&chain));
    }
    for mut row in total.row_iter_mut() {
        let s: f64 = row.sum();
        if s > 0.0 {
            row /= s;
        }
    }
    total
}

/// ln p_ij − ln(λ · colsum_j / total) on the support of `p`, NaN elsewhere.
pub fn dense_shifted_log(p: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let total = p.sum();
    let noise: Vec<f64> = p.column_iter().map(|c| c.sum() / total).collect();
    DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| {
        if p[(i, j)] > 0.0 {
            p[(i, j)].ln() - (lambda * noise[j]).ln()
        } else {
            f64::NAN
        }
    })
}

/// I_i(θ) from the power series Σ_s (θ/2)^{2s+i} / (s! (s+i)!).
pub fn bessel_series(order: usize, theta: f64) -> f64 {
    let half = theta / 2.0;
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut s = 0usize;
    loop {
        s += 1;
        term *= half * half / (s as f64 * (s + order) as f64);
        sum += term;
        if term <= 1e-20 * sum {
            return sum;
        }
    }
}

/// Spectral data of L = I − D⁻¹A through its symmetric similar form:
/// L = D^{-1/2} U Λ Uᵀ D^{1/2}.
pub struct LaplacianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub sqrt_degree: Vec<f64>,
}

pub fn laplacian_spectrum(g: &SparseGraph) -> LaplacianSpectrum {
    let n = g.node_count();
    let a = dense_adjacency(g);
    let sqrt_degree: Vec<f64> = g
        .degree()
        .iter()
        .map(|&d| if d > 0.0 { d.sqrt() } else { 1.0 })
        .collect();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - a[(i, j)] / (sqrt_degree[i] * sqrt_degree[j])
    });
    let eig = SymmetricEigen::new(sym);
    LaplacianSpectrum {
        eigenvalues: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
        sqrt_degree,
    }
}

impl LaplacianSpectrum {
    /// f(L) as a dense matrix.
    pub fn function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.vectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.eigenvalues[k]);
        }
        let inner = scaled * self.vectors.transpose();
        DMatrix::from_fn(n, n, |i, j| inner[(i, j)] / self.sqrt_degree[i] * self.sqrt_degree[j])
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::MIN, f64::max)
    }
}

/// exp(−½[(λ−μ)² − 1]θ).
pub fn band_pass(mu: f64, theta: f64) -> impl Fn(f64) -> f64 {
    move |lambda| (-0.5 * ((lambda - mu).powi(2) - 1.0) * theta).exp()
}

/// D⁻¹A (X − L̃X) with L̃ from the eigendecomposition.
pub fn dense_propagation(g: &SparseGraph, mu: f64, theta: f64, x: &DMatrix<f64>) -> DMatrix<f64> {
    let modulated = laplacian_spectrum(g).function(band_pass(mu, theta));
    dense_transition(g) * (x - modulated * x)
}

pub fn max_abs(x: &DMatrix<f64>) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    use rand_distr::StandardNormal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Mean cosine similarity of row pairs within a block and across blocks.
pub fn cosine_separation(x: &DMatrix<f64>, block: &[usize]) -> (f64, f64) {
    let norms: Vec<f64> = x.row_iter().map(|r| r.norm()).collect();
    let (mut intra, mut intra_n, mut inter, mut inter_n) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..x.nrows() {
        for j in (i + 1)..x.nrows() {
            if norms[i] == 0.0 || norms[j] == 0.0 {
                continue;
            }
            let c = x.row(i).dot(&x.row(j)) / (norms[i] * norms[j]);
            if block[i] == block[j] {
                intra += c;
                intra_n += 1;
            } else {
                inter += c;
                inter_n += 1;
            }
        }
    }
    (intra / intra_n as f64, inter / inter_n as f64)
}
